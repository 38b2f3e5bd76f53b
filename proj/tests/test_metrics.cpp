#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "oracles.hpp"
#include "walkman/metrics.hpp"
#include "walkman/theory.hpp"

using namespace walkman;

TEST_SUITE_BEGIN("metrics");

namespace {

Graph complete_graph(int n) {
  GraphSpec spec;
  spec.family = GraphFamily::Complete;
  spec.n = n;
  return generate(spec);
}

ConsensusProblem scalar_two_agent_ls() {
  std::vector<Eigen::MatrixXd> A(2, Eigen::MatrixXd::Ones(1, 1));
  std::vector<Eigen::VectorXd> b(2, Eigen::VectorXd::Zero(1));
  b[0](0) = 1.0;
  b[1](0) = 3.0;
  return make_least_squares(A, b);
}

}  // namespace

TEST_CASE("round_time: single transmission mean is 1") {
  Rng rng(1);
  const int draws = 100000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += round_time(1, rng);
  double mean = sum / draws;
  // sd of Exp(1) is 1; 3 standard errors around the mean
  CHECK(std::abs(mean - 1.0) <= 3.0 / std::sqrt(double(draws)));
}

TEST_CASE("round_time: max of 10 has harmonic-number mean") {
  Rng rng(2);
  const int draws = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < draws; ++i) {
    double t = round_time(10, rng);
    sum += t;
    sumsq += t * t;
  }
  double mean = sum / draws;
  double expected = 0.0;
  for (int k = 1; k <= 10; ++k) expected += 1.0 / k;  // H_10 = 2.9289682...
  CHECK(expected == doctest::Approx(2.9289682539682538));
  double sd = std::sqrt(sumsq / draws - mean * mean);
  CHECK(std::abs(mean - expected) <= 3.0 * sd / std::sqrt(double(draws)));
}

TEST_CASE("round_time: zero transmissions is an error") {
  Rng rng(3);
  CHECK_THROWS_AS(round_time(0, rng), ParameterError);
}

TEST_CASE("augmented lagrangian: consensus state collapses to the objective") {
  Rng rng(4);
  ConsensusProblem prob = gen_least_squares(3, 4, 3, 0.1, rng);
  Eigen::VectorXd x = *prob.optimum;
  Eigen::MatrixXd Y = x.transpose().replicate(3, 1);
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(3, 3);
  CHECK(augmented_lagrangian(x, Y, Z, 7.0, prob) ==
        doctest::Approx(prob.objective(x)).epsilon(1e-12));

  // with z_i = grad f_i(x*) the extra terms still vanish at consensus
  for (int i = 0; i < 3; ++i) Z.row(i) = prob.local(i).grad(x).transpose();
  CHECK(augmented_lagrangian(x, Y, Z, 7.0, prob) ==
        doctest::Approx(prob.objective(x)).epsilon(1e-12));
}

TEST_CASE("augmented lagrangian: scalar hand evaluation") {
  // n=1, r=0, f=0.5 y^2, x=0, y=1, z=0, beta=2 -> 0.5 + 1 = 1.5
  std::vector<Eigen::MatrixXd> A(1, Eigen::MatrixXd::Ones(1, 1));
  std::vector<Eigen::VectorXd> b(1, Eigen::VectorXd::Zero(1));
  ConsensusProblem prob = make_least_squares(A, b);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  Eigen::MatrixXd Y = Eigen::MatrixXd::Ones(1, 1);
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(1, 1);
  CHECK(augmented_lagrangian(x, Y, Z, 2.0, prob) == doctest::Approx(1.5));
}

TEST_CASE("lyapunov: M equals L before any visit and is prox-forbidden") {
  ConsensusProblem prob = scalar_two_agent_ls();
  WalkmanState grad_state = init(prob, 5.0, InitMode::Zeros, Variant::Gradient);
  CHECK(lyapunov(grad_state, prob, LyapunovKind::M) ==
        doctest::Approx(lyapunov(grad_state, prob, LyapunovKind::L)));

  WalkmanState prox_state = init(prob, 5.0, InitMode::Zeros, Variant::Prox);
  CHECK_THROWS_AS(lyapunov(prox_state, prob, LyapunovKind::M), ConfigError);
}

TEST_CASE("lyapunov L equals the augmented lagrangian on the same state") {
  ConsensusProblem prob = scalar_two_agent_ls();
  WalkmanState s = init(prob, 4.001, InitMode::Zeros);
  step(s, 0, prob);
  step(s, 1, prob);
  CHECK(lyapunov(s, prob, LyapunovKind::L) ==
        doctest::Approx(augmented_lagrangian(s.x, s.Y, s.Z, s.beta, prob)));
}

TEST_CASE("h_beta: gradient vanishes at the consensus optimum") {
  Rng rng(6);
  ConsensusProblem prob = gen_least_squares(4, 6, 3, 0.1, rng);
  double beta = default_beta(prob, Variant::Prox);
  Eigen::MatrixXd Ystar = prob.optimum->transpose().replicate(prob.n, 1);
  CHECK(h_beta_grad(Ystar, prob, beta).norm() <= 1e-9);

  // h at the optimum is the global minimum over random perturbations
  double h_star = h_beta(Ystar, prob, beta);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::MatrixXd Y = Ystar;
    for (int i = 0; i < prob.n; ++i)
      for (int j = 0; j < prob.p; ++j) Y(i, j) += 0.3 * gauss(rng);
    CHECK(h_beta(Y, prob, beta) >= h_star - 1e-12);
  }
}

TEST_CASE("h_beta gradient and hessian match finite differences") {
  Rng rng(7);
  ConsensusProblem prob = gen_least_squares(3, 4, 2, 0.1, rng);
  double beta = default_beta(prob, Variant::Prox);
  const int n = prob.n, p = prob.p;

  auto h_of_vec = [&](const Eigen::VectorXd& v) {
    Eigen::MatrixXd Y(n, p);
    for (int i = 0; i < n; ++i) Y.row(i) = v.segment(i * p, p).transpose();
    return h_beta(Y, prob, beta);
  };

  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(n * p);
  for (int i = 0; i < n * p; ++i) v(i) = gauss(rng);
  Eigen::MatrixXd Y(n, p);
  for (int i = 0; i < n; ++i) Y.row(i) = v.segment(i * p, p).transpose();

  Eigen::VectorXd g = h_beta_grad(Y, prob, beta);
  Eigen::VectorXd fd = oracles::finite_difference_grad(h_of_vec, v);
  CHECK((g - fd).norm() / (1.0 + g.norm()) <= 1e-6);

  Eigen::MatrixXd H = h_beta_hessian(prob, beta);
  Eigen::MatrixXd Hfd = oracles::finite_difference_hessian(h_of_vec, v);
  CHECK((H - Hfd).norm() / (1.0 + H.norm()) <= 1e-5);

  // quadratic function: the Hessian is positive definite under invertible data
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK(es.eigenvalues().maxCoeff() <= beta / n + 1e-12);
}

TEST_CASE("h_beta equals the augmented lagrangian along an ls-initialized run") {
  Rng rng(8);
  ConsensusProblem prob = gen_least_squares(6, 5, 4, 0.1, rng);
  TransitionMatrix chain = build_chain(complete_graph(6), ChainKind::Simple);
  double beta = default_beta(prob, Variant::Prox);
  WalkmanState s = init(prob, beta, InitMode::LsClosedForm);

  // the state's (x, Y, Z) triple is exactly the pair the identity relates
  CHECK(h_beta(s.Y, prob, beta) ==
        doctest::Approx(augmented_lagrangian(s.x, s.Y, s.Z, beta, prob))
            .epsilon(1e-12));

  Rng walk(3);
  int agent = 0;
  for (int k = 0; k < 100; ++k) {
    step(s, agent, prob);
    double h = h_beta(s.Y, prob, beta);
    Eigen::VectorXd x_next = prob.reg->prox(s.xbar, beta);
    double L = augmented_lagrangian(x_next, s.Y, s.Z, beta, prob);
    CHECK(std::abs(h - L) <= 1e-9 * std::max(1.0, std::abs(h)));
    agent = walk_step(chain, agent, walk);
  }
}

TEST_CASE("h_beta descent along the trajectory") {
  Rng rng(9);
  ConsensusProblem prob = gen_least_squares(5, 5, 4, 0.1, rng);
  TransitionMatrix chain = build_chain(complete_graph(5), ChainKind::Simple);
  double beta = default_beta(prob, Variant::Prox);
  WalkmanState s = init(prob, beta, InitMode::LsClosedForm);

  Rng walk(4);
  int agent = 0;
  double h_prev = h_beta(s.Y, prob, beta);
  Eigen::MatrixXd Y_prev = s.Y;
  for (int k = 0; k < 200; ++k) {
    step(s, agent, prob);
    double h = h_beta(s.Y, prob, beta);
    double move = (s.Y - Y_prev).squaredNorm();
    CHECK(h_prev - h >= move / prob.n - 1e-9);
    h_prev = h;
    Y_prev = s.Y;
    agent = walk_step(chain, agent, walk);
  }
}

TEST_CASE("dual displacement bounded by primal displacement (prox variant)") {
  Rng rng(10);
  ConsensusProblem prob = gen_least_squares(5, 5, 4, 0.1, rng);
  TransitionMatrix chain = build_chain(complete_graph(5), ChainKind::Simple);
  WalkmanRunConfig cfg;
  cfg.stop.max_iters = 300;
  cfg.record_every = 1;
  long checked = 0;
  // the bound needs every z_i to carry a gradient, i.e. iterations past
  // the cover time
  auto observer = [&](const WalkmanState& s, const StepInfo& info) {
    if (!s.all_visited() || s.k <= s.cover_time + 1) return;
    ++checked;
    CHECK(info.dz.norm() <= prob.lipschitz * info.dy.norm() + 1e-9);
  };
  run_walkman(prob, chain, cfg, observer);
  CHECK(checked > 200);
}

TEST_CASE("lyapunov descent inequality after cover time (prox variant)") {
  Rng rng(11);
  ConsensusProblem prob = gen_least_squares(6, 5, 4, 0.1, rng);
  TransitionMatrix chain = build_chain(complete_graph(6), ChainKind::Simple);
  double beta = default_beta(prob, Variant::Prox);

  WalkmanState s = init(prob, beta, InitMode::Zeros);
  Rng walk(5);
  int agent = 2;
  double L_prev = lyapunov(s, prob, LyapunovKind::L);
  Eigen::VectorXd x_prev = s.x;
  Eigen::MatrixXd Y_prev = s.Y;
  double fstar = prob.objective(*prob.optimum);
  for (int k = 0; k < 400; ++k) {
    step(s, agent, prob);
    double L = lyapunov(s, prob, LyapunovKind::L);
    if (s.all_visited() && k > s.cover_time) {
      double lhs = L_prev - L;
      double rhs = 0.5 * (beta - prob.gamma) * (s.x - x_prev).squaredNorm() +
                   (s.Y - Y_prev).squaredNorm() / prob.n;
      CHECK(lhs >= rhs - 1e-8);
      // lower boundedness by the centralized minimum
      CHECK(L >= fstar - 1e-9);
    }
    L_prev = L;
    x_prev = s.x;
    Y_prev = s.Y;
    agent = walk_step(chain, agent, walk);
  }
}

TEST_CASE("M_beta nonincreasing after cover time (gradient variant)") {
  Rng rng(12);
  ConsensusProblem prob = gen_least_squares(5, 4, 3, 0.1, rng);
  TransitionMatrix chain = build_chain(complete_graph(5), ChainKind::Simple);
  double beta = default_beta(prob, Variant::Gradient);
  WalkmanState s = init(prob, beta, InitMode::Zeros, Variant::Gradient);
  Rng walk(6);
  int agent = 0;
  std::optional<double> M_prev;
  for (int k = 0; k < 400; ++k) {
    step(s, agent, prob);
    if (s.all_visited() && k > s.cover_time) {
      double M = lyapunov(s, prob, LyapunovKind::M);
      if (M_prev) CHECK(*M_prev - M >= -1e-8);
      M_prev = M;
    }
    agent = walk_step(chain, agent, walk);
  }
  CHECK(M_prev.has_value());
}

TEST_CASE("subgradient: zero at a consensus stationary point") {
  Rng rng(13);
  ConsensusProblem prob = gen_least_squares(3, 5, 3, 0.1, rng);
  double beta = 9.0;
  Eigen::MatrixXd Y = prob.optimum->transpose().replicate(3, 1);
  Eigen::MatrixXd Z(3, 3);
  for (int i = 0; i < 3; ++i) Z.row(i) = prob.local(i).grad(*prob.optimum).transpose();
  WalkmanState s = make_state(prob, beta, Variant::Prox, Y, Z);
  s.x = *prob.optimum;
  StepInfo info;
  info.agent = 0;
  info.dy = Eigen::VectorXd::Zero(3);
  info.dz = Eigen::VectorXd::Zero(3);
  CHECK(subgrad_norm_sq(s, info, prob) <= 1e-18);
}

TEST_CASE("subgradient: the two y-gradient routes agree (prox variant)") {
  Rng rng(14);
  ConsensusProblem prob = gen_least_squares(4, 4, 3, 0.1, rng);
  TransitionMatrix chain = build_chain(complete_graph(4), ChainKind::Simple);
  WalkmanRunConfig cfg;
  cfg.stop.max_iters = 150;
  cfg.record_every = 1;
  auto observer = [&](const WalkmanState& s, const StepInfo& info) {
    int i = info.agent;
    Eigen::VectorXd yi = s.Y.row(i).transpose();
    Eigen::VectorXd zi = s.Z.row(i).transpose();
    Eigen::VectorXd general =
        (prob.local(i).grad(yi) - zi + s.beta * (yi - s.x)) / prob.n;
    Eigen::VectorXd from_duals = -info.dz / prob.n;
    CHECK((general - from_duals).norm() <= 1e-10);
  };
  run_walkman(prob, chain, cfg, observer);
}

TEST_CASE("subgradient decays along a convergent run") {
  Rng rng(15);
  ConsensusProblem prob = gen_least_squares(5, 5, 4, 0.1, rng);
  TransitionMatrix chain = build_chain(complete_graph(5), ChainKind::Simple);
  WalkmanRunConfig cfg;
  cfg.stop.max_iters = 4000;
  cfg.record_every = 10;
  RunTrace trace = run_walkman(prob, chain, cfg);
  double first = *trace.rows[1].grad_g_sq;
  double last = *trace.rows.back().grad_g_sq;
  CHECK(last <= 1e-8 * first);
}

TEST_CASE("nnpca gap: zero at a stationary point, gradient norm inside") {
  Rng rng(16);
  NnPcaSource source;
  ConsensusProblem prob = gen_nnpca(3, 40, 5, source, rng);

  // strictly interior consensus point: gap = ||grad f||^2
  Eigen::VectorXd x = Eigen::VectorXd::Constant(5, 0.05);
  Eigen::MatrixXd Y = x.transpose().replicate(3, 1);
  double expected = prob.mean_grad(x).squaredNorm();
  CHECK(nnpca_optimality_gap(x, Y, prob) == doctest::Approx(expected).epsilon(1e-10));

  // projected top eigenvector of the average matrix is the KKT candidate
  Eigen::MatrixXd Sbar = Eigen::MatrixXd::Zero(5, 5);
  for (const auto& S : prob.nnpca->S) Sbar += S;
  Sbar /= 3.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sbar);
  Eigen::VectorXd top = es.eigenvectors().col(4);
  if (top.sum() < 0) top = -top;
  // the planted spike makes the top eigenvector entrywise nonnegative
  if (top.minCoeff() >= -1e-9) {
    Eigen::VectorXd xs = NonnegBallIndicator::project(top);
    Eigen::MatrixXd Ys = xs.transpose().replicate(3, 1);
    CHECK(nnpca_optimality_gap(xs, Ys, prob) <= 1e-12);
  }

  // consensus violation adds the squared deviation
  Eigen::MatrixXd Yoff = Y;
  Yoff(1, 2) += 0.3;
  CHECK(nnpca_optimality_gap(x, Yoff, prob) ==
        doctest::Approx(expected + 0.09).epsilon(1e-10));
}

TEST_CASE("normal cone distance: boundary cases") {
  // at zero the cone is the nonpositive orthant
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd v(3);
  v << -2.0, -1.0, 0.0;
  CHECK(distance_sq_to_normal_cone(v, x) == doctest::Approx(0.0));
  v << 1.0, -1.0, 0.5;
  CHECK(distance_sq_to_normal_cone(v, x) == doctest::Approx(1.25));

  // on the sphere the radial direction is free
  Eigen::VectorXd xs(2);
  xs << 1.0, 0.0;
  Eigen::VectorXd vr(2);
  vr << 3.0, 0.0;  // 3x is in the cone
  CHECK(distance_sq_to_normal_cone(vr, xs) == doctest::Approx(0.0));
  vr << -1.0, 0.0;  // negative radial multiples are not
  CHECK(distance_sq_to_normal_cone(vr, xs) == doctest::Approx(1.0));
}

TEST_CASE("comm ledger: walkman charges exactly one unit per iteration") {
  Rng rng(18);
  ConsensusProblem prob = gen_least_squares(4, 4, 3, 0.1, rng);
  TransitionMatrix chain = build_chain(complete_graph(4), ChainKind::Simple);
  WalkmanRunConfig cfg;
  cfg.stop.max_iters = 123;
  RunTrace trace = run_walkman(prob, chain, cfg);
  CHECK(trace.comm_units == doctest::Approx(123.0));
  CHECK(trace.iterations == 123);
  // ledger rejects negative charges
  CommLedger ledger;
  CHECK_THROWS_AS(ledger.charge(-1.0), ParameterError);
}

TEST_SUITE_END();
