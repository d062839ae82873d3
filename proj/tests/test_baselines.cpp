#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "ngar/baselines.hpp"
#include "ngar/errors.hpp"
#include "ngar/frechet.hpp"
#include "ngar/ggp.hpp"
#include "oracles.hpp"

using namespace ngar;

namespace {

AttributedGraph scalar_graph(double v) { return AttributedGraph::edgeless(Matrix::Constant(1, 1, v)); }

GraphSequence scalar_sequence(std::initializer_list<double> values) {
  GraphSequence s;
  for (double v : values) s.push_back(scalar_graph(v));
  return s;
}

GraphSequence random_sequence(std::mt19937_64& rng, int length, int n, int f) {
  GraphSequence s;
  for (int t = 0; t < length; ++t) s.push_back(oracle::random_graph(rng, n, f));
  return s;
}

bool valid_undirected(const AttributedGraph& g) {
  const auto& a = g.adjacency();
  return a == a.transpose() && a.diagonal().cast<int>().sum() == 0 && a.maxCoeff() <= 1;
}

}  // namespace

TEST_CASE("mean predictor") {
  std::mt19937_64 rng(1);
  const auto g = oracle::random_graph(rng, 4, 2);
  CHECK(predict_mean(GraphSequence(std::vector<AttributedGraph>(6, g))) == g);
  CHECK(predict_mean(scalar_sequence({1, 2, 3})).features()(0, 0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(predict_mean(GraphSequence{}), InvalidInput);

  const auto seq = random_sequence(rng, 30, 4, 2);
  const auto mean = predict_mean(seq);
  const double best = frechet_cost(mean, seq.graphs());
  for (const auto& cand : seq) CHECK(best <= frechet_cost(cand, seq.graphs()));
  CHECK(valid_undirected(mean));
}

TEST_CASE("martingale predictor") {
  std::mt19937_64 rng(2);
  const auto seq = random_sequence(rng, 2, 3, 2);
  CHECK(predict_mart(seq) == seq[1]);
  CHECK(predict_mart(seq.slice(0, 1)) == seq[0]);
  CHECK(ged(predict_mart(seq), seq.back()) == 0.0);
  CHECK_THROWS_AS(predict_mart(GraphSequence{}), InvalidInput);
}

TEST_CASE("moving average predictor") {
  std::mt19937_64 rng(3);
  const auto seq = random_sequence(rng, 10, 4, 2);
  CHECK(predict_move(seq, 1) == predict_mart(seq));
  const auto g = seq[0];
  CHECK(predict_move(GraphSequence(std::vector<AttributedGraph>(5, g)), 5) == g);
  const auto m = predict_move(scalar_sequence({0, 0, 3}), 3);
  CHECK(m.features()(0, 0) == doctest::Approx(1.0));
  CHECK(m.edge_count() == 0);
  CHECK_THROWS_AS(predict_move(seq, 11), InvalidInput);
  CHECK_THROWS_AS(predict_move(seq, 0), InvalidInput);
  CHECK(predict_move(seq, 10) == predict_mean(seq));
  // Only the last k graphs count.
  CHECK(predict_move(seq, 3) == frechet_mean_closed_form(seq.slice(7, 3).graphs()));
}

TEST_CASE("var recovers a scalar AR(1) coefficient") {
  GraphSequence seq;
  double x = 1.0;
  for (int t = 0; t < 50; ++t, x *= 0.9) seq.push_back(scalar_graph(x));
  const VarModel m = var_fit(seq, 1, 0.0);
  CHECK(m.dim() == 2);
  CHECK(m.coefficients[0](0, 0) == doctest::Approx(0.9).epsilon(1e-8));
  CHECK(std::abs(m.intercept(0)) < 1e-8);
}

TEST_CASE("var on constant data and the ridge limit") {
  std::mt19937_64 rng(4);
  const auto g = oracle::random_graph(rng, 3, 2);
  const GraphSequence constant(std::vector<AttributedGraph>(40, g));
  const VarModel m = var_fit(constant, 2, 1e-3);
  const AttributedGraph p = var_predict(m, constant.slice(0, 2));
  CHECK(p.adjacency() == g.adjacency());
  CHECK((p.features() - g.features()).cwiseAbs().maxCoeff() < 1e-3);

  const auto seq = random_sequence(rng, 60, 3, 2);
  const VarModel big = var_fit(seq, 2, 1e9);
  CHECK(big.intercept.cwiseAbs().maxCoeff() < 1e-6);
  for (const auto& b : big.coefficients) CHECK(b.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("var fit matches ridge normal equations") {
  std::mt19937_64 rng(5);
  const auto seq = random_sequence(rng, 80, 2, 2);
  const int k = 2;
  const double lambda = 0.3;
  const VarModel m = var_fit(seq, k, lambda);
  const int d = 2 * 2 + 2 * 2;
  // Independent oracle: normal equations over the nonzero regressors.
  std::vector<Vector> u;
  for (const auto& g : seq) u.push_back(vectorize(g));
  std::vector<int> live;
  for (int c = 0; c < d; ++c) {
    bool nonzero = false;
    for (const auto& v : u) nonzero |= v(c) != 0.0;
    if (nonzero) live.push_back(c);
  }
  const int rows = static_cast<int>(u.size()) - k;
  const int p = 1 + k * static_cast<int>(live.size());
  Matrix z(rows, p), y(rows, d);
  for (int r = 0; r < rows; ++r) {
    const int t = r + k - 1;
    z(r, 0) = 1.0;
    for (int i = 0; i < k; ++i)
      for (std::size_t c = 0; c < live.size(); ++c) z(r, 1 + i * live.size() + c) = u[t - i](live[c]);
    y.row(r) = u[t + 1].transpose();
  }
  const Matrix beta = (z.transpose() * z + lambda * Matrix::Identity(p, p)).ldlt().solve(z.transpose() * y);
  CHECK((m.intercept - beta.row(0).transpose()).cwiseAbs().maxCoeff() < 1e-8);
  for (int i = 0; i < k; ++i)
    for (std::size_t c = 0; c < live.size(); ++c)
      CHECK((m.coefficients[i].col(live[c]) - beta.row(1 + i * live.size() + c).transpose())
                .cwiseAbs()
                .maxCoeff() < 1e-8);
}

TEST_CASE("var errors") {
  std::mt19937_64 rng(6);
  const auto seq = random_sequence(rng, 20, 3, 2);  // D = 15
  CHECK_THROWS_AS(var_fit(seq, 5, 1e-6), InvalidInput);
  CHECK_THROWS_AS(var_fit(seq, 1, -1.0), InvalidInput);
  CHECK_THROWS_AS(var_fit(seq, 0, 1e-6), InvalidInput);

  // Two copies of the same regressor: singular without a ridge.
  GraphSequence dup;
  for (int t = 0; t < 30; ++t) {
    Matrix x(1, 2);
    x(0, 0) = x(0, 1) = std::sin(0.3 * t);
    dup.push_back(AttributedGraph::edgeless(x));
  }
  CHECK_THROWS_AS(var_fit(dup, 1, 0.0), NumericalError);
  CHECK_NOTHROW(var_fit(dup, 1, 1e-6));

  const VarModel m = var_fit(random_sequence(rng, 40, 3, 2), 2, 1e-6);
  CHECK_THROWS_AS(var_predict(m, seq.slice(0, 3)), InvalidInput);
}

TEST_CASE("var prediction assembly") {
  std::mt19937_64 rng(7);
  const auto g = oracle::random_graph(rng, 3, 2);
  VarModel m;
  m.n_nodes = 3;
  m.feature_dim = 2;
  m.order = 1;
  m.intercept = vectorize(g);
  m.coefficients = {Matrix::Zero(15, 15)};
  const auto seq = random_sequence(rng, 5, 3, 2);
  for (std::size_t t = 0; t < seq.size(); ++t) CHECK(var_predict(m, seq.slice(t, 1)) == g);

  m.intercept.tail(9).setConstant(0.9);
  const auto full = var_predict(m, seq.slice(0, 1));
  CHECK(full.edge_count() == 3);
  CHECK(valid_undirected(full));

  Matrix scores = Matrix::Zero(3, 3);
  scores(0, 1) = 0.8;
  scores(1, 0) = 0.3;  // mean 0.55
  scores(0, 2) = 0.9;
  scores(2, 0) = 0.0;  // mean 0.45
  scores(1, 1) = 1.0;
  const Adjacency b = binarize_symmetric(scores);
  CHECK(b(0, 1) == 1);
  CHECK(b(1, 0) == 1);
  CHECK(b(0, 2) == 0);
  CHECK(b(1, 1) == 0);
}

TEST_CASE("var is exact on noiseless pmlds") {
  const GraphSequence seq = generate_sequence(make_pmlds_config(5, 2, 11, 2, 0.0), 600);
  const int k = 20;
  const VarModel m = var_fit(seq.slice(0, 500), k, 1e-6);
  double se = 0.0;
  int count = 0;
  for (std::size_t t = 500; t < 600; ++t) {
    const auto p = var_predict(m, seq.slice(t - k, k));
    se += (p.features() - seq[t].features()).squaredNorm();
    count += 10;
  }
  CHECK(se / count <= 1e-6);
}

TEST_CASE("var model json round trip") {
  std::mt19937_64 rng(8);
  const VarModel m = var_fit(random_sequence(rng, 40, 2, 2), 2, 1e-3);
  const VarModel back = var_model_from_json(var_model_to_json(m));
  CHECK(back.intercept == m.intercept);
  REQUIRE(back.coefficients.size() == m.coefficients.size());
  for (std::size_t i = 0; i < m.coefficients.size(); ++i) CHECK(back.coefficients[i] == m.coefficients[i]);
  CHECK(back.ridge == m.ridge);
  CHECK_THROWS(var_model_from_json("{\"n_nodes\": 2}"));
}
