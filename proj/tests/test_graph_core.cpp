#include <doctest.h>

#include <random>

#include "ngar/distance.hpp"
#include "ngar/errors.hpp"
#include "ngar/frechet.hpp"
#include "oracles.hpp"

using namespace ngar;

namespace {

AttributedGraph scalar_graph(double v) { return AttributedGraph::edgeless(Matrix::Constant(1, 1, v)); }

Adjacency adjacency(int n, std::initializer_list<std::pair<int, int>> edges) {
  Adjacency a = Adjacency::Zero(n, n);
  for (auto [i, j] : edges) a(i, j) = a(j, i) = 1;
  return a;
}

}  // namespace

TEST_CASE("graph invariants are enforced") {
  const Matrix x = Matrix::Zero(3, 2);
  Adjacency a = adjacency(3, {{0, 1}});
  CHECK_NOTHROW(AttributedGraph(x, a));

  Adjacency diag = a;
  diag(2, 2) = 1;
  CHECK_THROWS_AS(AttributedGraph(x, diag), InvalidInput);

  Adjacency asym = Adjacency::Zero(3, 3);
  asym(0, 1) = 1;
  CHECK_THROWS_AS(AttributedGraph(x, asym), InvalidInput);
  CHECK_NOTHROW(AttributedGraph(x, asym, true));

  Adjacency nonbinary = a;
  nonbinary(0, 1) = nonbinary(1, 0) = 2;
  CHECK_THROWS_AS(AttributedGraph(x, nonbinary), InvalidInput);

  CHECK_THROWS_AS(AttributedGraph(x, Adjacency::Zero(2, 2)), InvalidInput);

  EdgeAttributes attrs{1, std::vector<double>(9, 0.0)};
  attrs.values[0 * 3 + 2] = 1.0;  // edge (0, 2) is absent
  CHECK_THROWS_AS(AttributedGraph(x, a, false, attrs), InvalidInput);
}

TEST_CASE("graph sequence requires a common shape") {
  GraphSequence seq;
  seq.push_back(AttributedGraph::edgeless(Matrix::Zero(3, 2)));
  CHECK_THROWS_AS(seq.push_back(AttributedGraph::edgeless(Matrix::Zero(4, 2))), InvalidInput);
  CHECK_THROWS_AS(seq.push_back(AttributedGraph::edgeless(Matrix::Zero(3, 1))), InvalidInput);
  CHECK_THROWS_AS(seq.push_back(AttributedGraph::edgeless(Matrix::Zero(3, 2), true)), InvalidInput);
  seq.push_back(AttributedGraph::edgeless(Matrix::Ones(3, 2)));
  CHECK(seq.size() == 2);
  CHECK(seq.slice(1, 1).front() == seq.back());
  CHECK_THROWS_AS(seq.slice(1, 2), InvalidInput);
}

TEST_CASE("ged basic examples") {
  std::mt19937_64 rng(1);
  const auto g = oracle::random_graph(rng, 5, 2);
  CHECK(ged(g, g) == 0.0);

  const Matrix x = Matrix::Random(4, 2);
  const AttributedGraph a(x, adjacency(4, {{0, 1}, {1, 2}}));
  const AttributedGraph b(x, adjacency(4, {{0, 1}, {1, 2}, {2, 3}}));
  CHECK(ged(a, b) == doctest::Approx(1.0));
  CHECK(ged_squared(a, b, {2.5}) == doctest::Approx(2.5));

  Matrix x1(2, 1), x2(2, 1);
  x1 << 1.0, 5.0;
  x2 << 5.0, 1.0;
  const auto s1 = AttributedGraph::edgeless(x1), s2 = AttributedGraph::edgeless(x2);
  CHECK(ged(s1, s2) == doctest::Approx(std::sqrt(32.0)));
  DistanceParams opt{1.0, Correspondence::optimal_permutation};
  CHECK(ged(s1, s2, opt) == 0.0);
  CHECK(optimal_alignment(s1, s2, opt).permutation == std::vector<int>{1, 0});
}

TEST_CASE("ged directed graphs count ordered pairs") {
  const Matrix x = Matrix::Zero(2, 1);
  Adjacency one = Adjacency::Zero(2, 2);
  one(0, 1) = 1;
  Adjacency both = one;
  both(1, 0) = 1;
  CHECK(ged_squared(AttributedGraph(x, Adjacency::Zero(2, 2), true), AttributedGraph(x, both, true)) ==
        doctest::Approx(2.0));
  CHECK(ged_squared(AttributedGraph(x, one, true), AttributedGraph(x, both, true)) ==
        doctest::Approx(1.0));
}

TEST_CASE("ged edge attributes") {
  const Matrix x = Matrix::Zero(2, 1);
  EdgeAttributes e1{2, {0, 0, 1.0, 2.0, 1.0, 2.0, 0, 0}};
  EdgeAttributes e2{2, {0, 0, 0.0, 2.0, 0.0, 2.0, 0, 0}};
  EdgeAttributes none{2, std::vector<double>(8, 0.0)};
  const AttributedGraph g1(x, adjacency(2, {{0, 1}}), false, e1);
  const AttributedGraph g2(x, adjacency(2, {{0, 1}}), false, e2);
  const AttributedGraph g0(x, Adjacency::Zero(2, 2), false, none);
  CHECK(ged_squared(g1, g2, {0.5}) == doctest::Approx(0.5 * 1.0));
  CHECK(ged_squared(g1, g0, {0.5}) == doctest::Approx(0.5 * (1.0 + 5.0)));
  CHECK(ged_squared(g0, g1, {0.5}) == doctest::Approx(0.5 * (1.0 + 5.0)));
}

TEST_CASE("ged errors") {
  const auto a = AttributedGraph::edgeless(Matrix::Zero(3, 2));
  const auto b = AttributedGraph::edgeless(Matrix::Zero(4, 2));
  CHECK_THROWS_AS(ged(a, b), InvalidInput);
  const auto big = AttributedGraph::edgeless(Matrix::Zero(9, 1));
  CHECK_THROWS_AS(ged(big, big, {1.0, Correspondence::optimal_permutation}), CapabilityError);
  CHECK_NOTHROW(ged(big, big, {1.0, Correspondence::optimal_permutation, 9}));
  CHECK_THROWS_AS(ged(a, a, {-1.0}), InvalidInput);
}

TEST_CASE("optimal permutation matches exhaustive enumeration") {
  std::mt19937_64 rng(7);
  for (int n : {1, 2, 3, 4, 5, 6}) {
    for (int trial = 0; trial < 20; ++trial) {
      const bool directed = trial % 3 == 0;
      const auto g = oracle::random_graph(rng, n, 2, 0.5, directed);
      const auto h = oracle::random_graph(rng, n, 2, 0.5, directed);
      const double alpha = 0.5 + trial % 4;
      const DistanceParams p{alpha, Correspondence::optimal_permutation};
      const auto al = optimal_alignment(g, h, p);
      CHECK(al.squared_distance == oracle::min_over_permutations(g, h, alpha));
      CHECK(al.squared_distance == doctest::Approx(oracle::cost(g, h, al.permutation, alpha)));
      CHECK(ged_squared(g, h, p) <= ged_squared(g, h, {alpha}) + 1e-12);
    }
  }
}

TEST_CASE("identity ged is a metric") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = oracle::random_graph(rng, 5, 2);
    const auto b = oracle::random_graph(rng, 5, 2);
    const auto c = oracle::random_graph(rng, 5, 2);
    CHECK(ged(a, b) >= 0.0);
    CHECK(ged(a, b) == doctest::Approx(ged(b, a)));
    CHECK(ged(a, c) <= ged(a, b) + ged(b, c) + 1e-12);
    CHECK((ged(a, b) == 0.0) == (a == b));
  }
}

TEST_CASE("frechet mean closed form examples") {
  std::mt19937_64 rng(3);
  const auto g = oracle::random_graph(rng, 4, 2);
  std::vector<AttributedGraph> one{g};
  CHECK(frechet_mean_closed_form(one) == g);

  const Matrix x = Matrix::Zero(3, 1);
  std::vector<AttributedGraph> tie{AttributedGraph(x, adjacency(3, {{0, 1}})),
                                   AttributedGraph::edgeless(x)};
  CHECK(frechet_mean_closed_form(tie).edge_count() == 0);

  std::vector<AttributedGraph> scalars{scalar_graph(1), scalar_graph(2), scalar_graph(3)};
  CHECK(frechet_mean_closed_form(scalars).features()(0, 0) == doctest::Approx(2.0));

  CHECK_THROWS_AS(frechet_mean_closed_form(std::span<const AttributedGraph>{}), InvalidInput);
  CHECK_THROWS_AS(frechet_mean_closed_form(scalars, {1.0, Correspondence::optimal_permutation}),
                  CapabilityError);
}

TEST_CASE("frechet mean beats every grid candidate on 3-node samples") {
  std::mt19937_64 rng(5);
  const std::vector<std::pair<int, int>> pairs{{0, 1}, {0, 2}, {1, 2}};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<AttributedGraph> sample;
    const int m = 2 + trial % 7;
    for (int i = 0; i < m; ++i) sample.push_back(oracle::random_graph(rng, 3, 1));
    const auto mean = frechet_mean_closed_form(sample);
    const double best = frechet_cost(mean, sample);
    Matrix centre = Matrix::Zero(3, 1);
    for (const auto& s : sample) centre += s.features();
    centre /= m;
    for (int mask = 0; mask < 8; ++mask) {
      Adjacency a = Adjacency::Zero(3, 3);
      for (int e = 0; e < 3; ++e)
        if (mask & (1 << e)) a(pairs[e].first, pairs[e].second) = a(pairs[e].second, pairs[e].first) = 1;
      for (int d0 = -2; d0 <= 2; ++d0)
        for (int d1 = -2; d1 <= 2; ++d1)
          for (int d2 = -2; d2 <= 2; ++d2) {
            Matrix x = centre;
            x(0, 0) += 0.05 * d0;
            x(1, 0) += 0.05 * d1;
            x(2, 0) += 0.05 * d2;
            CHECK(best <= frechet_cost(AttributedGraph(x, a), sample) + 1e-10);
          }
    }
  }
}

TEST_CASE("frechet mean bruteforce") {
  std::vector<AttributedGraph> scalars{scalar_graph(1), scalar_graph(2), scalar_graph(3)};
  CHECK(frechet_mean_bruteforce(scalars, scalars).features()(0, 0) == 2.0);
  std::vector<AttributedGraph> single{scalar_graph(4)};
  CHECK(frechet_mean_bruteforce(single, single) == single[0]);
  CHECK_THROWS_AS(frechet_mean_bruteforce(scalars, std::span<const AttributedGraph>{}), InvalidInput);

  // Equal costs resolve to the first candidate.
  std::vector<AttributedGraph> sym{scalar_graph(-1), scalar_graph(1)};
  std::vector<AttributedGraph> cands{scalar_graph(1), scalar_graph(-1)};
  CHECK(frechet_mean_bruteforce(sym, cands).features()(0, 0) == 1.0);

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<AttributedGraph> sample, candidates;
    for (int i = 0; i < 6; ++i) sample.push_back(oracle::random_graph(rng, 4, 2));
    candidates = sample;
    const auto mean = frechet_mean_closed_form(sample);
    candidates.insert(candidates.begin() + trial % 6, mean);
    CHECK(frechet_mean_bruteforce(sample, candidates) == mean);
  }
}

TEST_CASE("frechet variation") {
  std::mt19937_64 rng(2);
  const auto g = oracle::random_graph(rng, 4, 2);
  std::vector<AttributedGraph> same(5, g);
  CHECK(frechet_variation(same) == 0.0);
  std::vector<AttributedGraph> two{scalar_graph(0), scalar_graph(2)};
  CHECK(frechet_variation(two) == doctest::Approx(1.0));
  CHECK_THROWS_AS(frechet_variation(std::span<const AttributedGraph>{}), InvalidInput);

  std::vector<AttributedGraph> mixed{g, oracle::random_graph(rng, 4, 2)};
  CHECK(frechet_variation(mixed) > 0.0);
}

TEST_CASE("frechet mean recovers the centre graph under symmetric noise") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::bernoulli_distribution flip(0.2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto centre = oracle::random_graph(rng, 6, 2);
    std::vector<AttributedGraph> sample;
    for (int s = 0; s < 201; ++s) {
      Matrix x = centre.features();
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += noise(rng);
      Adjacency a = centre.adjacency();
      for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
          if (flip(rng)) a(i, j) = a(j, i) = 1 - a(i, j);
      sample.emplace_back(x, a);
    }
    CHECK(frechet_mean_closed_form(sample).adjacency() == centre.adjacency());
  }
}

TEST_CASE("edge attributed frechet mean minimises the cost per slot") {
  const Matrix x = Matrix::Zero(2, 1);
  auto attributed = [&](bool edge, double v) {
    EdgeAttributes e{1, std::vector<double>(4, 0.0)};
    if (edge) e.values[1] = e.values[2] = v;
    return AttributedGraph(x, edge ? adjacency(2, {{0, 1}}) : Adjacency::Zero(2, 2), false, e);
  };
  std::vector<AttributedGraph> sample{attributed(true, 1.0), attributed(true, 3.0),
                                      attributed(false, 0.0)};
  const auto mean = frechet_mean_closed_form(sample);
  const double best = frechet_cost(mean, sample);
  CHECK(best <= frechet_cost(attributed(false, 0.0), sample) + 1e-12);
  for (double v = -1.0; v <= 5.0; v += 0.125)
    CHECK(best <= frechet_cost(attributed(true, v), sample) + 1e-12);
}
