#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "ngar/dataset_io.hpp"
#include "ngar/delaunay.hpp"
#include "ngar/errors.hpp"
#include "ngar/ggp.hpp"
#include "oracles.hpp"

using namespace ngar;

namespace {

Matrix points(std::initializer_list<std::pair<double, double>> xy) {
  Matrix p(static_cast<Eigen::Index>(xy.size()), 2);
  Eigen::Index i = 0;
  for (auto [x, y] : xy) {
    p(i, 0) = x;
    p(i, 1) = y;
    ++i;
  }
  return p;
}

int edges(const Adjacency& a) { return a.cast<int>().sum() / 2; }

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ngar_test_" + name);
}

}  // namespace

TEST_CASE("delaunay examples") {
  CHECK(edges(delaunay_adjacency(points({{0, 0}, {1, 0}, {0, 1}}))) == 3);
  CHECK(edges(delaunay_adjacency(points({{0, 0}, {1, 0}, {1, 1}, {0, 1}}))) == 6);
  const Adjacency fan = delaunay_adjacency(points({{0, 0}, {4, 0}, {2, 3}, {2, 1}}));
  CHECK(edges(fan) == 6);
  for (int i = 0; i < 3; ++i) CHECK(fan(i, 3) == 1);
  CHECK(edges(delaunay_adjacency(points({{0, 0}, {1, 1}, {2, 2}, {3, 3}}))) == 0);
  CHECK(edges(delaunay_adjacency(points({{0, 0}, {1, 1}}))) == 0);
  CHECK(edges(delaunay_adjacency(points({{0, 0}}))) == 0);
  CHECK_THROWS_AS(delaunay_adjacency(Matrix::Zero(4, 3)), InvalidInput);
}

TEST_CASE("delaunay agrees with the circumcentre oracle and is equivariant") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 3 + trial % 6;
    Matrix p(n, 2);
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = normal(rng);
    const Adjacency a = delaunay_adjacency(p);
    CHECK(a == oracle::delaunay(p));
    CHECK(edges(a) <= 3 * n - 6);
    CHECK(a == a.transpose());
    CHECK(a.diagonal().cast<int>().sum() == 0);

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix q(n, 2);
    for (int i = 0; i < n; ++i) q.row(i) = p.row(perm[i]);
    const Adjacency b = delaunay_adjacency(q);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(b(i, j) == a(perm[i], perm[j]));
  }
}

TEST_CASE("rotation omega") {
  RotationalConfig cfg = make_rotational_config(3, 1, 0);
  cfg.phase_offsets = {0.5, 0.0, 0.0};
  std::vector<Vector> zero{Vector::Zero(6)};
  CHECK(rotation_omega(zero, 1, cfg) == doctest::Approx(0.51));

  cfg.amplitude = 0.0;
  std::vector<Vector> rnd{Vector::Random(6)};
  CHECK(rotation_omega(rnd, 1, cfg) == 0.5);

  RotationalConfig p2 = make_rotational_config(3, 2, 0);
  p2.phase_offsets = {0.0, 0.0, 0.0};
  Vector xt = Vector::Zero(6), xp = Vector::Zero(6);
  xt(0) = 1.0;
  xp(1) = 1.0;
  std::vector<Vector> hist{xt, xp};
  CHECK(rotation_omega(hist, 1, p2) == doctest::Approx(0.01 * std::cos(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(rotation_omega(zero, 1, p2), InvalidInput);
  CHECK_THROWS_AS(rotation_omega(hist, 4, p2), InvalidInput);
}

TEST_CASE("rotational step") {
  Rng rng(1);
  RotationalConfig cfg = make_rotational_config(4, 1, 3, 0.0, 0.0);
  std::fill(cfg.phase_offsets.begin(), cfg.phase_offsets.end(), 0.0);
  std::vector<Vector> hist{Vector::Random(8)};
  CHECK(rotational_step(hist, cfg, rng) == hist[0]);

  RotationalConfig rot = make_rotational_config(4, 1, 3, 0.0);
  for (int t = 0; t < 50; ++t) {
    const Vector next = rotational_step(hist, rot, rng);
    CHECK(next.norm() == doctest::Approx(hist[0].norm()).epsilon(1e-12));
    hist[0] = next;
  }

  RotationalConfig quarter = make_rotational_config(1, 1, 0, 0.0, 0.0);
  quarter.phase_offsets = {std::numbers::pi / 2 - 1.0};  // stays in (-1, 1]
  quarter.amplitude = 1.0;
  // omega = c + cos(0) = pi/2 for the zero-sum history below
  Vector x(2);
  x << 1.0, -1.0;  // components sum to 0
  std::vector<Vector> h{x};
  const Vector out = rotational_step(h, quarter, rng);
  CHECK(out(0) == doctest::Approx(-1.0));
  CHECK(out(1) == doctest::Approx(-1.0));

  Vector e(2);
  e << 1.0, 0.0;
  // x=(1,0): sum 1, omega = c + cos(1); choose c so omega = pi/2.
  RotationalConfig q2 = quarter;
  q2.phase_offsets = {std::numbers::pi / 2 - std::cos(1.0)};
  std::vector<Vector> he{e};
  const Vector r = rotational_step(he, q2, rng);
  CHECK(r(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r(1) == doctest::Approx(-1.0));
}

TEST_CASE("random orthogonal") {
  Rng rng(5);
  const Matrix r1 = random_orthogonal(1, rng);
  CHECK(std::abs(r1(0, 0)) == 1.0);
  for (int c : {2, 5, 11, 20}) {
    const Matrix r = random_orthogonal(c, rng);
    CHECK((r.transpose() * r - Matrix::Identity(c, c)).cwiseAbs().maxCoeff() < 1e-10);
    const Vector v = Vector::Random(c);
    CHECK((r * v).norm() == doctest::Approx(v.norm()).epsilon(1e-10));
  }
  const Matrix r20 = random_orthogonal(20, rng);
  Eigen::EigenSolver<Matrix> es(r20);
  for (int i = 0; i < 20; ++i) CHECK(std::abs(std::abs(es.eigenvalues()(i)) - 1.0) < 1e-8);
  CHECK_THROWS_AS(random_orthogonal(0, rng), InvalidInput);

  Rng a(9), b(9);
  CHECK(random_orthogonal(7, a) == random_orthogonal(7, b));
}

TEST_CASE("pmlds step") {
  Rng rng(2);
  PmldsConfig cfg = make_pmlds_config(2, 2, 5, 1, 0.0);
  cfg.dynamics_matrix = Matrix::Identity(5, 5);
  const Vector x = Vector::Random(5);
  CHECK(pmlds_step(x, cfg, rng) == x);

  PmldsConfig rnd = make_pmlds_config(2, 2, 5, 1, 0.0);
  CHECK(pmlds_step(x, rnd, rng).norm() == doctest::Approx(x.norm()).epsilon(1e-12));
  CHECK(pmlds_step(x, rnd, rng) == rnd.dynamics_matrix * x);
  CHECK_THROWS_AS(pmlds_step(Vector::Zero(4), rnd, rng), InvalidInput);
  CHECK_THROWS_AS(make_pmlds_config(5, 2, 10, 0), InvalidInput);
}

TEST_CASE("config validation") {
  RotationalConfig r = make_rotational_config(3, 2, 0);
  for (double c : r.phase_offsets) CHECK((c > -1.0 && c <= 1.0));
  r.feature_dim = 3;
  CHECK_THROWS_AS(r.validate(), InvalidInput);
  r = make_rotational_config(3, 2, 0);
  r.phase_offsets[0] = -1.0;
  CHECK_THROWS_AS(r.validate(), InvalidInput);
  PmldsConfig p = make_pmlds_config(5, 2, 11, 0);
  p.dynamics_matrix(0, 0) += 1e-6;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
}

TEST_CASE("generated sequences") {
  for (const GgpConfig& cfg : {GgpConfig{make_rotational_config(5, 3, 1)},
                               GgpConfig{make_pmlds_config(5, 2, 15, 1)}}) {
    CHECK(generate_sequence(cfg, 0).empty());
    CHECK_THROWS_AS(generate_sequence(cfg, -1), InvalidInput);
    const GraphSequence seq = generate_sequence(cfg, 200);
    REQUIRE(seq.size() == 200);
    for (const auto& g : seq) {
      CHECK(g.order() == 5);
      CHECK(g.feature_dim() == 2);
      CHECK(g.adjacency() == g.adjacency().transpose());
      CHECK(g.adjacency().diagonal().cast<int>().sum() == 0);
      CHECK(g.adjacency() == delaunay_adjacency(g.features()));
    }
    CHECK(generate_sequence(cfg, 200) == seq);
  }
}

TEST_CASE("noiseless processes preserve the latent norm") {
  Rng rng(8);
  PmldsProcess pm(make_pmlds_config(5, 2, 11, 3, 0.0), rng);
  RotationalProcess rp(make_rotational_config(5, 4, 3, 0.0), rng);
  const double n0 = pm.state().norm(), r0 = rp.state().norm();
  for (int t = 0; t < 10000; ++t) {
    pm.step(rng);
    rp.step(rng);
  }
  CHECK(std::abs(pm.state().norm() - n0) < 1e-10 * std::max(1.0, n0));
  CHECK(std::abs(rp.state().norm() - r0) < 1e-10 * std::max(1.0, r0));
  CHECK(pm.observed() == pm.state().head(10));
}

TEST_CASE("observed pmlds components follow a linear recurrence of order c") {
  const int c = 11;
  Rng rng(12);
  PmldsProcess pm(make_pmlds_config(5, 2, c, 4, 0.0), rng);
  std::vector<Vector> u;
  for (int t = 0; t < 200; ++t) {
    u.push_back(pm.observed());
    pm.step(rng);
  }
  // u_{t+c} = sum_i a_i u_{t+i}, one scalar coefficient per lag.
  const int rows = static_cast<int>(u.size() - c) * 10;
  Matrix design(rows, c);
  Vector target(rows);
  int r = 0;
  for (std::size_t t = 0; t + c < u.size(); ++t)
    for (int d = 0; d < 10; ++d, ++r) {
      for (int i = 0; i < c; ++i) design(r, i) = u[t + i](d);
      target(r) = u[t + c](d);
    }
  const Vector a = design.colPivHouseholderQr().solve(target);
  CHECK((design * a - target).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("graph from observation is row-major") {
  Vector v(6);
  v << 0, 0, 1, 0, 0, 1;
  const auto g = graph_from_observation(v, 3, 2);
  CHECK(g.features()(1, 0) == 1.0);
  CHECK(g.features()(2, 1) == 1.0);
  CHECK(g.edge_count() == 3);
}

TEST_CASE("dataset round trip") {
  const GgpConfig cfg = make_pmlds_config(4, 2, 9, 3);
  const GraphSequence seq = generate_sequence(cfg, 50);
  const auto path = temp_path("roundtrip.jsonl");
  save_sequence(seq, path, cfg);
  const Dataset ds = load_dataset(path);
  CHECK(ds.sequence == seq);
  REQUIRE(ds.origin.has_value());
  CHECK(std::get<PmldsConfig>(*ds.origin).dynamics_matrix == std::get<PmldsConfig>(cfg).dynamics_matrix);

  save_sequence(GraphSequence{}, path);
  CHECK(load_sequence(path).empty());

  std::mt19937_64 rng(1);
  GraphSequence directed;
  for (int i = 0; i < 5; ++i) directed.push_back(oracle::random_graph(rng, 4, 3, 0.5, true));
  save_sequence(directed, path);
  CHECK(load_sequence(path) == directed);

  const Matrix x = Matrix::Random(2, 1);
  Adjacency a = Adjacency::Zero(2, 2);
  a(0, 1) = a(1, 0) = 1;
  EdgeAttributes e{2, {0, 0, 0.25, -1.0 / 3.0, 0.25, -1.0 / 3.0, 0, 0}};
  GraphSequence attributed;
  attributed.push_back(AttributedGraph(x, a, false, e));
  save_sequence(attributed, path);
  CHECK(load_sequence(path) == attributed);
  std::filesystem::remove(path);
}

TEST_CASE("malformed datasets raise parse errors") {
  const GraphSequence seq = generate_sequence(make_rotational_config(3, 1, 0), 10);
  const auto path = temp_path("truncated.jsonl");
  save_sequence(seq, path);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();

  {
    std::ofstream out(path, std::ios::trunc);
    out << text.substr(0, text.size() / 2);
  }
  CHECK_THROWS_AS(load_sequence(path), ParseError);

  {
    std::ofstream out(path, std::ios::trunc);
    const auto first = text.find('\n');
    out << text.substr(0, first + 1) << "{\"t\":0,\"N\":3}\n";
  }
  try {
    load_sequence(path);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }

  {
    std::ofstream out(path, std::ios::trunc);
    out << "not json\n";
  }
  CHECK_THROWS_AS(load_sequence(path), ParseError);
  CHECK_THROWS_AS(load_sequence(temp_path("does_not_exist.jsonl")), IoError);
  std::filesystem::remove(path);
}

TEST_CASE("csv export") {
  const GraphSequence seq = generate_sequence(make_rotational_config(3, 1, 0), 4);
  const auto path = temp_path("export.csv");
  export_csv(seq, path);
  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  CHECK(header.rfind("t,", 0) == 0);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 6 + 9);
  }
  CHECK(rows == 4);
  std::filesystem::remove(path);
}

TEST_CASE("generator config text round trip") {
  const GgpConfig r = make_rotational_config(4, 3, 17, 0.002, 0.02);
  const auto back = std::get<RotationalConfig>(ggp_config_from_json(ggp_config_to_json(r)));
  CHECK(back.phase_offsets == std::get<RotationalConfig>(r).phase_offsets);
  CHECK(back.order == 3);
  CHECK(back.noise_std == 0.002);

  const auto drawn = std::get<PmldsConfig>(
      ggp_config_from_json(R"({"type":"pmlds","n_nodes":5,"feature_dim":2,"complexity":11,"seed":3})"));
  CHECK(drawn.dynamics_matrix == make_pmlds_config(5, 2, 11, 3).dynamics_matrix);
}
