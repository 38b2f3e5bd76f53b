#include "walkman/baselines.hpp"

#include <cmath>

#include "walkman/metrics.hpp"

namespace walkman::baselines {

Eigen::MatrixXd metropolis_weights(const Graph& g) {
  if (!is_connected(g)) throw TopologyError("mixing matrix: graph must be connected");
  auto deg = g.degrees();
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(g.n, g.n);
  for (const auto& [i, j] : g.edges) {
    double w = 1.0 / (1.0 + std::max(deg[i], deg[j]));
    W(i, j) = w;
    W(j, i) = w;
  }
  for (int i = 0; i < g.n; ++i) W(i, i) = 1.0 - W.row(i).sum();
  return W;
}

StepSchedule StepSchedule::Constant(double alpha) {
  if (!(alpha > 0.0)) throw ParameterError("schedule: alpha must be positive");
  StepSchedule s;
  s.constant = alpha;
  return s;
}

StepSchedule StepSchedule::Decaying(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw ParameterError("schedule: a, b must be positive");
  StepSchedule s;
  s.decay_a = a;
  s.decay_b = b;
  s.decaying = true;
  return s;
}

double StepSchedule::at(long k) const {
  if (!decaying) return constant;
  return std::min(decay_a, decay_b / static_cast<double>(k));
}

IncrementalState init_incremental(const ConsensusProblem& prob, StepSchedule schedule) {
  IncrementalState s;
  s.x = Eigen::VectorXd::Zero(prob.p);
  s.schedule = schedule;
  return s;
}

void rw_incremental_step(IncrementalState& state, int agent,
                         const ConsensusProblem& prob) {
  if (agent < 0 || agent >= prob.n)
    throw ParameterError("incremental step: agent out of range");
  state.k += 1;
  double alpha = state.schedule.at(state.k);
  Eigen::VectorXd forward = state.x - alpha * prob.local(agent).grad(state.x);
  state.x = prob.reg->prox(forward, 1.0 / alpha);
}

// ---------------------------------------------------------------------------
// EXTRA / PG-EXTRA

namespace {
Eigen::MatrixXd stacked_grads(const ConsensusProblem& prob, const Eigen::MatrixXd& X) {
  Eigen::MatrixXd G(prob.n, prob.p);
  for (int i = 0; i < prob.n; ++i)
    G.row(i) = prob.local(i).grad(X.row(i).transpose()).transpose();
  return G;
}

Eigen::MatrixXd prox_rows(const ConsensusProblem& prob, const Eigen::MatrixXd& V,
                          double alpha) {
  Eigen::MatrixXd out(V.rows(), V.cols());
  for (int i = 0; i < V.rows(); ++i)
    out.row(i) = prob.reg->prox(V.row(i).transpose(), 1.0 / alpha).transpose();
  return out;
}
}  // namespace

ExtraState init_extra(const ConsensusProblem& prob, const Eigen::MatrixXd& W,
                      double alpha, bool with_prox_r) {
  if (!(alpha > 0.0)) throw ParameterError("extra: alpha must be positive");
  ExtraState s;
  s.X = Eigen::MatrixXd::Zero(prob.n, prob.p);
  s.Xprev = s.X;
  s.W = W;
  s.Wtilde = 0.5 * (W + Eigen::MatrixXd::Identity(prob.n, prob.n));
  s.Grad = stacked_grads(prob, s.X);
  s.Gprev = s.Grad;
  s.Waccum = s.X;
  s.alpha = alpha;
  s.with_prox_r = with_prox_r;
  return s;
}

void extra_step(ExtraState& s, const ConsensusProblem& prob) {
  Eigen::MatrixXd next_accum;
  if (s.k == 0) {
    next_accum = s.W * s.X - s.alpha * s.Grad;
  } else {
    next_accum = s.Waccum + s.W * s.X - s.Wtilde * s.Xprev -
                 s.alpha * (s.Grad - s.Gprev);
  }
  Eigen::MatrixXd next = s.with_prox_r ? prox_rows(prob, next_accum, s.alpha)
                                       : next_accum;
  s.Xprev = s.X;
  s.Gprev = s.Grad;
  s.X = next;
  s.Waccum = next_accum;
  s.Grad = stacked_grads(prob, s.X);
  s.k += 1;
}

// ---------------------------------------------------------------------------
// Exact diffusion

DiffusionState init_exact_diffusion(const ConsensusProblem& prob,
                                    const Eigen::MatrixXd& W, double alpha) {
  if (!(alpha > 0.0)) throw ParameterError("exact diffusion: alpha must be positive");
  DiffusionState s;
  s.X = Eigen::MatrixXd::Zero(prob.n, prob.p);
  s.Psi = s.X;
  s.Wbar = 0.5 * (W + Eigen::MatrixXd::Identity(prob.n, prob.n));
  s.alpha = alpha;
  return s;
}

void exact_diffusion_step(DiffusionState& s, const ConsensusProblem& prob) {
  Eigen::MatrixXd psi = s.X - s.alpha * stacked_grads(prob, s.X);  // adapt
  Eigen::MatrixXd phi = psi + s.X - s.Psi;                         // correct
  s.X = s.Wbar * phi;                                              // combine
  s.Psi = psi;
  s.k += 1;
}

// ---------------------------------------------------------------------------
// D-ADMM

Eigen::VectorXd composite_prox(const LocalObjective& f, const Regularizer& r,
                               const Eigen::VectorXd& v, double beta,
                               double lipschitz) {
  if (dynamic_cast<const ZeroRegularizer*>(&r)) return f.prox(v, beta);
  // Proximal gradient on the strongly convex subproblem.
  double step = 1.0 / (lipschitz + beta);
  Eigen::VectorXd x = v;
  for (int iter = 0; iter < 2000; ++iter) {
    Eigen::VectorXd forward = x - step * (f.grad(x) + beta * (x - v));
    Eigen::VectorXd next = r.prox(forward, 1.0 / step);
    double move = (next - x).norm();
    x = next;
    if (move <= 1e-13 * std::max(1.0, x.norm())) break;
  }
  return x;
}

DadmmState init_dadmm(const ConsensusProblem& prob, const Graph& g, double beta) {
  if (!(beta > 0.0)) throw ParameterError("d-admm: beta must be positive");
  if (g.n != prob.n) throw ParameterError("d-admm: graph size != agent count");
  DadmmState s;
  s.X = Eigen::MatrixXd::Zero(prob.n, prob.p);
  s.Duals = Eigen::MatrixXd::Zero(prob.n, prob.p);
  s.adjacency = g.adjacency();
  s.degrees = g.degrees();
  s.beta = beta;
  return s;
}

void dadmm_step(DadmmState& s, const ConsensusProblem& prob) {
  const int n = prob.n;
  Eigen::MatrixXd next(n, prob.p);
  for (int i = 0; i < n; ++i) {
    int d = s.degrees[i];
    if (d == 0) {
      // isolated agent: proximal minimization of its own objective
      next.row(i) = composite_prox(prob.local(i), *prob.reg, s.X.row(i).transpose(),
                                   s.beta, prob.lipschitz)
                        .transpose();
      continue;
    }
    Eigen::VectorXd neighbor_sum = Eigen::VectorXd::Zero(prob.p);
    for (int j : s.adjacency[i]) neighbor_sum += s.X.row(j).transpose();
    Eigen::VectorXd u =
        (s.beta * (d * s.X.row(i).transpose() + neighbor_sum) -
         s.Duals.row(i).transpose()) /
        (2.0 * s.beta * d);
    next.row(i) =
        composite_prox(prob.local(i), *prob.reg, u, 2.0 * s.beta * d, prob.lipschitz)
            .transpose();
  }
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd neighbor_sum = Eigen::VectorXd::Zero(prob.p);
    for (int j : s.adjacency[i]) neighbor_sum += next.row(j).transpose();
    s.Duals.row(i) += s.beta * (s.degrees[i] * next.row(i).transpose() - neighbor_sum);
  }
  s.X = next;
  s.k += 1;
}

// ---------------------------------------------------------------------------
// Runners

namespace {

std::optional<double> relative_mse(const Eigen::VectorXd& x,
                                   const ConsensusProblem& prob) {
  if (!prob.optimum) return std::nullopt;
  double denom = prob.optimum->squaredNorm();
  double err = (x - *prob.optimum).squaredNorm();
  return denom > 0.0 ? err / denom : err;
}

TraceRow gossip_row(const Eigen::MatrixXd& X, const ConsensusProblem& prob, long k,
                    double comm, double time) {
  TraceRow row;
  row.k = k;
  row.comm_units = comm;
  row.sim_time = time;
  Eigen::VectorXd mean = X.colwise().mean().transpose();
  row.mse = relative_mse(mean, prob);
  if (prob.family == ProblemFamily::NnPca)
    row.nnpca_gap = nnpca_optimality_gap(mean, X, prob);
  return row;
}

bool row_diverged(const Eigen::MatrixXd& X) {
  double norm = X.norm();
  return !std::isfinite(norm) || norm > 1e12;
}

template <typename StepFn, typename StateX>
RunTrace gossip_loop(const ConsensusProblem& prob, const Graph& g,
                     const GossipRunConfig& cfg, StateX& state, StepFn do_step) {
  ClockModel clock(cfg.latency_seed);
  CommLedger ledger;
  const double per_round = 2.0 * g.num_edges();

  RunTrace trace;
  trace.rows.push_back(gossip_row(state.X, prob, 0, 0.0, 0.0));
  long max_iters = cfg.stop.max_iters.value_or(-1);
  if (max_iters == 0) {
    trace.final_mse = trace.rows.back().mse;
    trace.final_objective =
        prob.objective(state.X.colwise().mean().transpose());
    return trace;
  }

  for (long k = 0;; ++k) {
    do_step();
    ledger.charge(per_round);
    clock.advance(static_cast<int>(per_round));
    long done = k + 1;
    bool at_record = done % cfg.record_every == 0;
    bool at_limit = max_iters >= 0 && done >= max_iters;
    if (at_record || at_limit) {
      TraceRow row = gossip_row(state.X, prob, done, ledger.units, clock.sim_time);
      trace.rows.push_back(row);
      if (row_diverged(state.X)) {
        trace.status = RunStatus::Diverged;
        break;
      }
      if (cfg.stop.mse_tol && row.mse && *row.mse <= *cfg.stop.mse_tol) {
        trace.status = RunStatus::MseTol;
        break;
      }
      if (at_limit) {
        trace.status = RunStatus::MaxIters;
        break;
      }
    }
    trace.iterations = done;
  }
  trace.iterations = trace.rows.back().k;
  trace.comm_units = ledger.units;
  trace.sim_time = clock.sim_time;
  trace.final_mse = trace.rows.back().mse;
  trace.final_objective =
      prob.objective(state.X.colwise().mean().transpose());
  return trace;
}

}  // namespace

RunTrace run_gossip(const ConsensusProblem& prob, const Graph& g,
                    const GossipRunConfig& cfg) {
  if (cfg.record_every < 1) throw ParameterError("gossip run: record_every must be >= 1");
  Eigen::MatrixXd W = metropolis_weights(g);
  auto seed_start = [&](Eigen::MatrixXd& X) {
    if (!cfg.start) return;
    if (cfg.start->rows() != prob.n || cfg.start->cols() != prob.p)
      throw ParameterError("gossip run: start shape mismatch");
    X = *cfg.start;
  };
  switch (cfg.algo) {
    case GossipAlgo::Extra: {
      ExtraState s = init_extra(prob, W, cfg.alpha, false);
      seed_start(s.X);
      s.Grad = s.Xprev = s.Waccum = s.X;
      s.Grad.setZero();
      for (int i = 0; i < prob.n; ++i)
        s.Grad.row(i) = prob.local(i).grad(s.X.row(i).transpose()).transpose();
      s.Gprev = s.Grad;
      return gossip_loop(prob, g, cfg, s, [&] { extra_step(s, prob); });
    }
    case GossipAlgo::PgExtra: {
      ExtraState s = init_extra(prob, W, cfg.alpha, true);
      seed_start(s.X);
      s.Xprev = s.Waccum = s.X;
      for (int i = 0; i < prob.n; ++i)
        s.Grad.row(i) = prob.local(i).grad(s.X.row(i).transpose()).transpose();
      s.Gprev = s.Grad;
      return gossip_loop(prob, g, cfg, s, [&] { extra_step(s, prob); });
    }
    case GossipAlgo::ExactDiffusion: {
      DiffusionState s = init_exact_diffusion(prob, W, cfg.alpha);
      seed_start(s.X);
      s.Psi = s.X;
      return gossip_loop(prob, g, cfg, s, [&] { exact_diffusion_step(s, prob); });
    }
    case GossipAlgo::DAdmm: {
      DadmmState s = init_dadmm(prob, g, cfg.beta);
      seed_start(s.X);
      return gossip_loop(prob, g, cfg, s, [&] { dadmm_step(s, prob); });
    }
  }
  throw ParameterError("gossip run: unknown algorithm");
}

RunTrace run_incremental(const ConsensusProblem& prob, const TransitionMatrix& chain,
                         const IncrementalRunConfig& cfg) {
  if (chain.n() != prob.n)
    throw ParameterError("incremental run: chain size != agent count");
  if (cfg.start < 0 || cfg.start >= prob.n)
    throw ParameterError("incremental run: start node out of range");
  if (cfg.record_every < 1)
    throw ParameterError("incremental run: record_every must be >= 1");

  IncrementalState state = init_incremental(prob, cfg.schedule);
  if (cfg.x0) {
    if (cfg.x0->size() != prob.p)
      throw ParameterError("incremental run: x0 size mismatch");
    state.x = *cfg.x0;
  }
  Rng walk_rng(cfg.walk_seed);
  ClockModel clock(cfg.latency_seed);
  CommLedger ledger;

  auto make_row = [&](long k) {
    TraceRow row;
    row.k = k;
    row.comm_units = ledger.units;
    row.sim_time = clock.sim_time;
    row.mse = relative_mse(state.x, prob);
    if (prob.family == ProblemFamily::NnPca)
      row.nnpca_gap = nnpca_optimality_gap(state.x, prob);
    return row;
  };

  RunTrace trace;
  trace.rows.push_back(make_row(0));
  long max_iters = cfg.stop.max_iters.value_or(-1);
  if (max_iters == 0) {
    trace.final_mse = trace.rows.back().mse;
    trace.final_objective = prob.objective(state.x);
    return trace;
  }

  int agent = cfg.start;
  for (long k = 0;; ++k) {
    if (cfg.with_prox_r) {
      rw_incremental_step(state, agent, prob);
    } else {
      state.k += 1;
      double alpha = state.schedule.at(state.k);
      state.x -= alpha * prob.local(agent).grad(state.x);
    }
    ledger.charge(1.0);
    clock.advance(1);
    long done = k + 1;
    bool at_record = done % cfg.record_every == 0;
    bool at_limit = max_iters >= 0 && done >= max_iters;
    if (at_record || at_limit) {
      TraceRow row = make_row(done);
      trace.rows.push_back(row);
      double norm = state.x.norm();
      if (!std::isfinite(norm) || norm > 1e12) {
        trace.status = RunStatus::Diverged;
        break;
      }
      if (cfg.stop.mse_tol && row.mse && *row.mse <= *cfg.stop.mse_tol) {
        trace.status = RunStatus::MseTol;
        break;
      }
      if (at_limit) {
        trace.status = RunStatus::MaxIters;
        break;
      }
    }
    agent = walk_step(chain, agent, walk_rng);
  }
  trace.iterations = trace.rows.back().k;
  trace.comm_units = ledger.units;
  trace.sim_time = clock.sim_time;
  trace.final_mse = trace.rows.back().mse;
  trace.final_objective = prob.objective(state.x);
  return trace;
}

}  // namespace walkman::baselines
