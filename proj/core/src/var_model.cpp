#include <Eigen/QR>
#include <cmath>

#include "json_io.hpp"
#include "ngar/baselines.hpp"
#include "ngar/errors.hpp"

namespace ngar {

Vector vectorize(const AttributedGraph& g) {
  const int n = g.order();
  const int f = g.feature_dim();
  Vector u(n * f + n * n);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < f; ++c) u[i * f + c] = g.features()(i, c);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) u[n * f + i * n + j] = g.adjacency()(i, j);
  return u;
}

VarModel var_fit(const GraphSequence& train, int k, double ridge) {
  if (k < 1) throw InvalidInput("VAR order must be >= 1");
  if (ridge < 0.0) throw InvalidInput("ridge must be nonnegative");
  if (train.empty()) throw InvalidInput("VAR needs training data");
  const int n = train.front().order();
  const int f = train.front().feature_dim();
  const int d = n * f + n * n;
  const long length = static_cast<long>(train.size());
  if (length <= k + d)
    throw InvalidInput("VAR(" + std::to_string(k) + ") on D = " + std::to_string(d) +
                       " needs more than " + std::to_string(k + d) + " training graphs, got " +
                       std::to_string(length));

  std::vector<Vector> u;
  u.reserve(train.size());
  for (const auto& g : train) u.push_back(vectorize(g));

  // Row for target t+1: [1, u_t, u_{t-1}, ..., u_{t-k+1}].
  const long rows = length - k;
  const long cols = 1 + static_cast<long>(k) * d;
  Matrix z(rows, cols);
  Matrix y(rows, d);
  for (long r = 0; r < rows; ++r) {
    const long t = r + k - 1;
    z(r, 0) = 1.0;
    for (int lag = 0; lag < k; ++lag) z.row(r).segment(1 + lag * d, d) = u[t - lag].transpose();
    y.row(r) = u[t + 1].transpose();
  }

  std::vector<Eigen::Index> active;
  for (Eigen::Index c = 0; c < cols; ++c)
    if (!z.col(c).isZero(0.0)) active.push_back(c);
  const auto p = static_cast<Eigen::Index>(active.size());
  Matrix za(rows, p);
  for (Eigen::Index c = 0; c < p; ++c) za.col(c) = z.col(active[c]);

  Matrix solution;
  if (ridge > 0.0) {
    Matrix augmented(rows + p, p);
    augmented.topRows(rows) = za;
    augmented.bottomRows(p) = std::sqrt(ridge) * Matrix::Identity(p, p);
    Matrix rhs = Matrix::Zero(rows + p, d);
    rhs.topRows(rows) = y;
    solution = augmented.householderQr().solve(rhs);
  } else {
    Eigen::ColPivHouseholderQR<Matrix> qr(za);
    if (qr.rank() < p)
      throw NumericalError("VAR normal equations are singular (rank " +
                           std::to_string(qr.rank()) + " < " + std::to_string(p) +
                           "); use a ridge penalty > 0");
    solution = qr.solve(y);
  }
  if (!solution.allFinite()) throw NumericalError("VAR fit produced non-finite coefficients");

  Matrix full = Matrix::Zero(cols, d);
  for (Eigen::Index c = 0; c < p; ++c) full.row(active[c]) = solution.row(c);

  VarModel model;
  model.n_nodes = n;
  model.feature_dim = f;
  model.order = k;
  model.ridge = ridge;
  model.intercept = full.row(0).transpose();
  model.coefficients.reserve(static_cast<std::size_t>(k));
  for (int lag = 0; lag < k; ++lag)
    model.coefficients.push_back(full.middleRows(1 + lag * d, d).transpose());
  return model;
}

Vector var_predict_vector(const VarModel& model, const GraphSequence& window) {
  if (window.size() != static_cast<std::size_t>(model.order))
    throw InvalidInput("VAR window must hold exactly " + std::to_string(model.order) +
                       " graphs, got " + std::to_string(window.size()));
  Vector out = model.intercept;
  const std::size_t last = window.size() - 1;
  for (int lag = 0; lag < model.order; ++lag) {
    const Vector u = vectorize(window[last - static_cast<std::size_t>(lag)]);
    if (u.size() != model.dim()) throw InvalidInput("window graphs do not match the VAR model");
    out.noalias() += model.coefficients[static_cast<std::size_t>(lag)] * u;
  }
  return out;
}

AttributedGraph var_predict(const VarModel& model, const GraphSequence& window) {
  const Vector u = var_predict_vector(model, window);
  const int n = model.n_nodes;
  const int f = model.feature_dim;
  Matrix x(n, f);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < f; ++c) x(i, c) = u[i * f + c];
  Matrix scores(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scores(i, j) = u[n * f + i * n + j];
  return AttributedGraph(std::move(x), binarize_symmetric(scores));
}

std::string var_model_to_json(const VarModel& model) {
  detail::Json j;
  j["n_nodes"] = model.n_nodes;
  j["feature_dim"] = model.feature_dim;
  j["order"] = model.order;
  j["ridge"] = model.ridge;
  j["intercept"] = std::vector<double>(model.intercept.data(),
                                       model.intercept.data() + model.intercept.size());
  detail::Json coefs = detail::Json::array();
  for (const auto& b : model.coefficients) coefs.push_back(detail::matrix_to_json(b));
  j["coefficients"] = std::move(coefs);
  return j.dump();
}

VarModel var_model_from_json(std::string_view text) {
  try {
    const auto j = detail::Json::parse(text);
    VarModel model;
    model.n_nodes = j.at("n_nodes").get<int>();
    model.feature_dim = j.at("feature_dim").get<int>();
    model.order = j.at("order").get<int>();
    model.ridge = j.at("ridge").get<double>();
    const int d = model.dim();
    const auto intercept = j.at("intercept").get<std::vector<double>>();
    if (static_cast<int>(intercept.size()) != d) throw InvalidInput("intercept length mismatch");
    model.intercept = Eigen::Map<const Vector>(intercept.data(), d);
    const auto& coefs = j.at("coefficients");
    if (coefs.size() != static_cast<std::size_t>(model.order))
      throw InvalidInput("expected one coefficient matrix per lag");
    for (const auto& c : coefs) model.coefficients.push_back(detail::matrix_from_json(c, d, d));
    return model;
  } catch (const std::exception& e) {
    throw ParseError(1, std::string("VAR model: ") + e.what());
  }
}

}  // namespace ngar
