#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>

#include "oracles.hpp"
#include "walkman/markov.hpp"

using namespace walkman;

TEST_SUITE_BEGIN("markov");

namespace {

Graph make_path3() {
  Graph g;
  g.n = 3;
  g.edges = {{0, 1}, {1, 2}};
  return g;
}

Graph make_cycle(int n) {
  GraphSpec spec;
  spec.family = GraphFamily::Cycle;
  spec.n = n;
  return generate(spec);
}

Graph make_complete(int n) {
  GraphSpec spec;
  spec.family = GraphFamily::Complete;
  spec.n = n;
  return generate(spec);
}

TransitionMatrix uniform_chain(int n) {
  TransitionMatrix tm;
  tm.kind = ChainKind::MaxDegree;
  tm.P = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  return tm;
}

}  // namespace

TEST_CASE("build_chain rejects disconnected graphs") {
  Graph g;
  g.n = 4;
  g.edges = {{0, 1}, {2, 3}};
  CHECK_THROWS_AS(build_chain(g, ChainKind::Simple), TopologyError);
}

TEST_CASE("max-degree chain on complete n=4") {
  TransitionMatrix tm = build_chain(make_complete(4), ChainKind::MaxDegree);
  for (int i = 0; i < 4; ++i) {
    CHECK(tm.P(i, i) == doctest::Approx(0.0));
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(tm.P(i, j) == doctest::Approx(1.0 / 3.0));
  }
  CHECK(tm.is_symmetric());
}

TEST_CASE("simple chain on cycle n=4 is periodic") {
  TransitionMatrix tm = build_chain(make_cycle(4), ChainKind::Simple);
  for (int i = 0; i < 4; ++i) {
    int nonzero = 0;
    for (int j = 0; j < 4; ++j)
      if (tm.P(i, j) > 0) {
        CHECK(tm.P(i, j) == doctest::Approx(0.5));
        ++nonzero;
      }
    CHECK(nonzero == 2);
  }
  CHECK(tm.periodic_warning);
  CHECK(spectral(tm).sigma == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(lazify(tm).periodic_warning);
}

TEST_CASE("simple chain on path: middle row") {
  TransitionMatrix tm = build_chain(make_path3(), ChainKind::Simple);
  CHECK(tm.P(1, 0) == doctest::Approx(0.5));
  CHECK(tm.P(1, 1) == doctest::Approx(0.0));
  CHECK(tm.P(1, 2) == doctest::Approx(0.5));
  CHECK(tm.P(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("transition matrix invariants") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    GraphSpec spec;
    spec.family = GraphFamily::Gilbert;
    spec.n = 9;
    spec.p = 0.45;
    spec.seed = 100 + trial;
    Graph g = generate(spec);
    for (ChainKind kind : {ChainKind::Simple, ChainKind::MaxDegree}) {
      TransitionMatrix tm = build_chain(g, kind);
      for (int i = 0; i < g.n; ++i) {
        CHECK(tm.P.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(tm.P.row(i).minCoeff() >= 0.0);
      }
      // support only on edges (plus diagonal for max-degree)
      auto adj = g.adjacency();
      for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
          if (i != j && tm.P(i, j) > 0)
            CHECK(std::binary_search(adj[i].begin(), adj[i].end(), j));
      if (kind == ChainKind::MaxDegree) CHECK(tm.is_symmetric());
    }
  }
}

TEST_CASE("stationary: uniform for max-degree kind") {
  for (int seed : {1, 2, 3}) {
    GraphSpec spec;
    spec.family = GraphFamily::Gilbert;
    spec.n = 11;
    spec.p = 0.4;
    spec.seed = seed;
    Graph g = generate(spec);
    Eigen::VectorXd pi = stationary(build_chain(g, ChainKind::MaxDegree));
    for (int i = 0; i < g.n; ++i) CHECK(pi(i) == doctest::Approx(1.0 / g.n).epsilon(1e-10));
  }
}

TEST_CASE("stationary on path 0-1-2 simple kind") {
  TransitionMatrix tm = build_chain(make_path3(), ChainKind::Simple);
  Eigen::VectorXd pi = stationary(tm);
  CHECK(pi(0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(pi(1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pi(2) == doctest::Approx(0.25).epsilon(1e-12));
  // power-iteration oracle and the degree formula d_i/(2m)
  Eigen::VectorXd oracle = oracles::stationary_by_power_iteration(tm.P);
  CHECK((pi - oracle).norm() < 1e-9);
  CHECK((tm.P.transpose() * pi - pi).norm() < 1e-10);
}

TEST_CASE("stationary on complete n=3 simple kind is uniform") {
  Eigen::VectorXd pi = stationary(build_chain(make_complete(3), ChainKind::Simple));
  for (int i = 0; i < 3; ++i) CHECK(pi(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("spectral: uniform chain has sigma 0") {
  SpectralInfo info = spectral(uniform_chain(4));
  CHECK(info.sigma == doctest::Approx(0.0).epsilon(1e-12));
  REQUIRE(info.lambda2.has_value());
  CHECK(*info.lambda2 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("spectral: cycle second eigenvalue is cos(2 pi / n)") {
  for (int n : {4, 5, 8, 16}) {
    TransitionMatrix tm = build_chain(make_cycle(n), ChainKind::Simple);
    SpectralInfo info = spectral(tm);
    REQUIRE(info.lambda2_second.has_value());
    CHECK(*info.lambda2_second ==
          doctest::Approx(std::cos(2.0 * M_PI / n)).epsilon(1e-10));
  }
}

TEST_CASE("spectral: path eigenvalues against a dense eigensolver") {
  TransitionMatrix tm = build_chain(make_path3(), ChainKind::Simple);
  Eigen::EigenSolver<Eigen::MatrixXd> es(tm.P);
  std::vector<double> mags;
  for (int i = 0; i < 3; ++i) mags.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(mags.begin(), mags.end());
  // eigenvalues are {1, 0, -1}
  CHECK(mags[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mags[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mags[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectral(tm).sigma == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sigma equals lambda2 for symmetric chains") {
  for (int seed : {4, 9, 21}) {
    GraphSpec spec;
    spec.family = GraphFamily::Gilbert;
    spec.n = 10;
    spec.p = 0.5;
    spec.seed = seed;
    TransitionMatrix tm = build_chain(generate(spec), ChainKind::MaxDegree);
    SpectralInfo info = spectral(tm);
    REQUIRE(info.lambda2.has_value());
    CHECK(info.sigma == doctest::Approx(*info.lambda2).epsilon(1e-10));
  }
}

TEST_CASE("mixing_time: uniform chain n=4, delta=1/2 gives 3") {
  CHECK(mixing_time(uniform_chain(4), 0.5) == 3);
}

TEST_CASE("mixing_time formula at sigma=0") {
  // delta -> 1 limit: ceil(ln(sqrt(2) n))
  for (int n : {4, 10, 100}) {
    TransitionMatrix tm = uniform_chain(n);
    int expected = static_cast<int>(std::ceil(std::log(std::sqrt(2.0) * n)));
    CHECK(mixing_time(tm, 1.0 - 1e-12) == expected);
  }
}

TEST_CASE("mixing_time rejects periodic chains") {
  TransitionMatrix tm = build_chain(make_cycle(4), ChainKind::Simple);
  CHECK_THROWS_AS(mixing_time(tm, 0.5), ChainError);
}

TEST_CASE("verify_mixing: uniform chain at tau=1") {
  CHECK(verify_mixing(uniform_chain(4), 1e-6, 1));
}

TEST_CASE("verify_mixing: periodic cycle never mixes") {
  TransitionMatrix tm = build_chain(make_cycle(4), ChainKind::Simple);
  CHECK_FALSE(verify_mixing(tm, 0.1, 1));
  CHECK_FALSE(verify_mixing(tm, 0.1, 1000));
}

TEST_CASE("verify_mixing holds at the mixing_time bound") {
  std::vector<TransitionMatrix> chains;
  chains.push_back(build_chain(make_complete(6), ChainKind::Simple));
  chains.push_back(lazify(build_chain(make_cycle(8), ChainKind::Simple)));
  GraphSpec spec;
  spec.family = GraphFamily::Gilbert;
  spec.n = 12;
  spec.p = 0.4;
  spec.seed = 2;
  chains.push_back(build_chain(generate(spec), ChainKind::MaxDegree));
  spec.family = GraphFamily::Geometric;
  spec.n = 20;
  spec.side = 30;
  spec.radius = 15;
  chains.push_back(build_chain(generate(spec), ChainKind::MaxDegree));

  for (const auto& tm : chains) {
    for (double delta : {0.9, 0.5, 0.1}) {
      int tau = mixing_time(tm, delta);
      CAPTURE(tau);
      CHECK(verify_mixing(tm, delta, tau));
    }
  }
}

TEST_CASE("verify_mixing repeated-squaring path matches naive powering") {
  // tau > 64 switches to repeated squaring; pin the boundary against a
  // 70-fold naive product computed here
  TransitionMatrix lazy = lazify(build_chain(make_cycle(12), ChainKind::Simple));
  Eigen::VectorXd pi = stationary(lazy);
  const int tau = 70;
  Eigen::MatrixXd pk = Eigen::MatrixXd::Identity(12, 12);
  for (int t = 0; t < tau; ++t) pk = pk * lazy.P;
  double worst = 0.0;
  for (int i = 0; i < 12; ++i)
    worst = std::max(worst, (pk.row(i).transpose() - pi).norm());
  double delta_hi = 1.01 * worst / pi.minCoeff();
  double delta_lo = 0.99 * worst / pi.minCoeff();
  REQUIRE(delta_hi < 1.0);
  CHECK(verify_mixing(lazy, delta_hi, tau));
  CHECK_FALSE(verify_mixing(lazy, delta_lo, tau));
}

TEST_CASE("sample_walk: single node") {
  Graph g;
  g.n = 1;
  TransitionMatrix tm = build_chain(g, ChainKind::Simple);
  Rng rng(0);
  WalkResult walk = sample_walk(tm, 0, 5, rng);
  CHECK(walk.nodes == std::vector<int>{0, 0, 0, 0, 0, 0});
  REQUIRE(walk.cover_time.has_value());
  CHECK(*walk.cover_time == 0);
}

TEST_CASE("sample_walk: deterministic first move on a path") {
  TransitionMatrix tm = build_chain(make_path3(), ChainKind::Simple);
  Rng rng(123);
  WalkResult walk = sample_walk(tm, 0, 1, rng);
  CHECK(walk.nodes[1] == 1);  // row 0 has single support
}

TEST_CASE("sample_walk: bit-identical across runs with one seed") {
  TransitionMatrix tm = build_chain(make_complete(6), ChainKind::Simple);
  Rng a(42), b(42);
  WalkResult wa = sample_walk(tm, 2, 500, a);
  WalkResult wb = sample_walk(tm, 2, 500, b);
  CHECK(wa.nodes == wb.nodes);
  CHECK(wa.cover_time == wb.cover_time);
}

TEST_CASE("sample_walk: uniform chain visit frequencies") {
  const int n = 4;
  const long steps = 200000;
  TransitionMatrix tm = uniform_chain(n);
  Rng rng(11);
  WalkResult walk = sample_walk(tm, 0, steps, rng);
  std::map<int, long> counts;
  for (int node : walk.nodes) counts[node]++;
  double se = std::sqrt(0.25 * 0.75 / steps);
  for (auto& [node, count] : counts) {
    double freq = static_cast<double>(count) / (steps + 1);
    CHECK(std::abs(freq - 0.25) <= 3.0 * se);
  }
  REQUIRE(walk.cover_time.has_value());
}

TEST_CASE("chain_stats bundles the pieces") {
  TransitionMatrix tm = build_chain(make_complete(5), ChainKind::MaxDegree);
  ChainStats stats = chain_stats(tm, 0.5);
  CHECK(stats.pi_star == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(stats.tau == mixing_time(tm, 0.5));
  CHECK(stats.sigma == doctest::Approx(spectral(tm).sigma));
}

TEST_SUITE_END();
