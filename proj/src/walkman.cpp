#include "walkman/walkman.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "walkman/metrics.hpp"

namespace walkman {

double WalkmanState::token_residual() const {
  Eigen::VectorXd mean =
      (Y - Z / beta).colwise().mean().transpose();
  return (xbar - mean).norm();
}

double default_beta(const ConsensusProblem& prob, Variant variant, double margin) {
  double L = prob.lipschitz;
  double base = variant == Variant::Prox
                    ? std::max(prob.gamma, 2.0 * L + 2.0)
                    : std::max(prob.gamma, 2.0 * L * L + L + 2.0);
  if (prob.family == ProblemFamily::LeastSquares && prob.ls)
    base = std::max(base, 2.0 * prob.ls->sigma_max_star + 2.0);
  return base + margin;
}

namespace {

WalkmanState blank_state(const ConsensusProblem& prob, double beta, Variant variant) {
  if (!(beta > 0.0)) throw ParameterError("walkman: beta must be positive");
  WalkmanState s;
  s.beta = beta;
  s.variant = variant;
  s.Y = Eigen::MatrixXd::Zero(prob.n, prob.p);
  s.Z = Eigen::MatrixXd::Zero(prob.n, prob.p);
  s.xbar = Eigen::VectorXd::Zero(prob.p);
  s.x = Eigen::VectorXd::Zero(prob.p);
  s.last_update.assign(prob.n, -1);
  s.last_disp_sq = Eigen::VectorXd::Zero(prob.n);
  s.Y_prev_visit = Eigen::MatrixXd::Zero(prob.n, prob.p);
  return s;
}

void finalize_init(WalkmanState& s, const ConsensusProblem& prob) {
  s.xbar = (s.Y - s.Z / s.beta).colwise().mean().transpose();
  s.x = prob.reg->prox(s.xbar, s.beta);
}

}  // namespace

WalkmanState init(const ConsensusProblem& prob, double beta, InitMode mode,
                  Variant variant) {
  WalkmanState s = blank_state(prob, beta, variant);
  switch (mode) {
    case InitMode::Zeros:
      break;
    case InitMode::StationaryLocal: {
      if (!(beta > prob.lipschitz))
        throw ParameterError(
            "walkman init: stationary-local requires beta > L for a unique solution");
      for (int i = 0; i < prob.n; ++i) {
        Eigen::VectorXd y = prob.local(i).stationary_point(beta, prob.p);
        s.Y.row(i) = y.transpose();
        s.Z.row(i) = beta * y.transpose();
      }
      break;
    }
    case InitMode::LsClosedForm: {
      if (prob.family != ProblemFamily::LeastSquares || !prob.ls)
        throw ParameterError("walkman init: ls-closed-form needs a least-squares problem");
      if (!(beta > prob.ls->sigma_max_star))
        throw ParameterError("walkman init: ls-closed-form requires beta > sigma*_max");
      for (int i = 0; i < prob.n; ++i) {
        const auto* q = dynamic_cast<const QuadraticObjective*>(&prob.local(i));
        if (!q)
          throw ParameterError("walkman init: ls-closed-form needs quadratic locals");
        Eigen::MatrixXd m = -q->gram();
        m.diagonal().array() += beta;
        // y0 = (A^T A - beta I)^{-1} A^T b
        Eigen::VectorXd y = Eigen::LLT<Eigen::MatrixXd>(m).solve(-q->Atb());
        s.Y.row(i) = y.transpose();
        s.Z.row(i) = q->grad(y).transpose();
      }
      break;
    }
  }
  finalize_init(s, prob);
  return s;
}

WalkmanState make_state(const ConsensusProblem& prob, double beta, Variant variant,
                        const Eigen::MatrixXd& Y0, const Eigen::MatrixXd& Z0) {
  if (Y0.rows() != prob.n || Y0.cols() != prob.p || Z0.rows() != prob.n ||
      Z0.cols() != prob.p)
    throw ParameterError("walkman: initial Y/Z shape mismatch");
  WalkmanState s = blank_state(prob, beta, variant);
  s.Y = Y0;
  s.Z = Z0;
  finalize_init(s, prob);
  return s;
}

StepInfo step(WalkmanState& s, int agent, const ConsensusProblem& prob) {
  if (agent < 0 || agent >= prob.n) throw ParameterError("walkman step: agent out of range");
  const double beta = s.beta;

  s.x = prob.reg->prox(s.xbar, beta);

  Eigen::VectorXd y_old = s.Y.row(agent).transpose();
  Eigen::VectorXd z_old = s.Z.row(agent).transpose();
  Eigen::VectorXd y_new;
  if (s.variant == Variant::Prox) {
    y_new = prob.local(agent).prox(s.x + z_old / beta, beta);
  } else {
    y_new = s.x + z_old / beta - prob.local(agent).grad(y_old) / beta;
  }
  Eigen::VectorXd z_new = z_old + beta * (s.x - y_new);

  // token update: only the visited agent's contribution to the mean moves
  s.xbar += ((y_new - z_new / beta) - (y_old - z_old / beta)) / prob.n;

  s.Y.row(agent) = y_new.transpose();
  s.Z.row(agent) = z_new.transpose();
  s.Y_prev_visit.row(agent) = y_old.transpose();
  s.last_disp_sq(agent) = (y_new - y_old).squaredNorm();

  bool first_visit = s.last_update[agent] < 0;
  s.last_update[agent] = s.k;
  if (first_visit && s.cover_time < 0) {
    bool all = true;
    for (long t : s.last_update)
      if (t < 0) all = false;
    if (all) s.cover_time = s.k;
  }
  s.k += 1;

  StepInfo info;
  info.agent = agent;
  info.dy = y_new - y_old;
  info.dz = z_new - z_old;
  return info;
}

namespace {

std::optional<double> relative_mse(const WalkmanState& s, const ConsensusProblem& prob) {
  if (!prob.optimum) return std::nullopt;
  double denom = prob.optimum->squaredNorm();
  double err = (s.x - *prob.optimum).squaredNorm();
  return denom > 0.0 ? err / denom : err;
}

TraceRow make_row(const WalkmanState& s, const StepInfo* info,
                  const ConsensusProblem& prob, double comm, double time) {
  TraceRow row;
  row.k = s.k;
  row.comm_units = comm;
  row.sim_time = time;
  row.mse = relative_mse(s, prob);
  row.L_beta = lyapunov(s, prob, LyapunovKind::L);
  if (s.variant == Variant::Gradient)
    row.M_beta = lyapunov(s, prob, LyapunovKind::M);
  if (prob.family == ProblemFamily::LeastSquares)
    row.h_beta = h_beta(s.Y, prob, s.beta);
  if (info) row.grad_g_sq = subgrad_norm_sq(s, *info, prob);
  if (prob.family == ProblemFamily::NnPca)
    row.nnpca_gap = nnpca_optimality_gap(s.x, s.Y, prob);
  return row;
}

bool diverged(const WalkmanState& s) {
  double norm = s.x.norm();
  return !std::isfinite(norm) || norm > 1e12;
}

}  // namespace

RunTrace run_walkman_from(WalkmanState state, const ConsensusProblem& prob,
                          const TransitionMatrix& chain, const WalkmanRunConfig& cfg,
                          const StepObserver& observer) {
  if (chain.n() != prob.n) throw ParameterError("walkman run: chain size != agent count");
  if (cfg.start < 0 || cfg.start >= prob.n)
    throw ParameterError("walkman run: start node out of range");
  if (cfg.record_every < 1) throw ParameterError("walkman run: record_every must be >= 1");

  Rng walk_rng(cfg.walk_seed);
  ClockModel clock(cfg.latency_seed);
  CommLedger ledger;

  RunTrace trace;
  trace.rows.push_back(make_row(state, nullptr, prob, 0.0, 0.0));

  long max_iters = cfg.stop.max_iters.value_or(-1);
  if (max_iters == 0) {
    trace.status = RunStatus::MaxIters;
    trace.final_mse = trace.rows.back().mse;
    trace.final_objective = prob.objective(state.x);
    return trace;
  }

  int agent = cfg.start;
  for (long k = 0;; ++k) {
    StepInfo info = step(state, agent, prob);
    ledger.charge(1.0);
    clock.advance(1);
    if (observer) observer(state, info);

    long done = k + 1;
    bool at_record = done % cfg.record_every == 0;
    bool at_limit = max_iters >= 0 && done >= max_iters;
    if (at_record || at_limit) {
      TraceRow row = make_row(state, &info, prob, ledger.units, clock.sim_time);
      trace.rows.push_back(row);
      if (diverged(state)) {
        trace.status = RunStatus::Diverged;
        break;
      }
      if (cfg.stop.mse_tol && row.mse && *row.mse <= *cfg.stop.mse_tol) {
        trace.status = RunStatus::MseTol;
        break;
      }
      if (cfg.stop.grad_tol && row.grad_g_sq && *row.grad_g_sq <= *cfg.stop.grad_tol) {
        trace.status = RunStatus::GradTol;
        break;
      }
      if (at_limit) {
        trace.status = RunStatus::MaxIters;
        break;
      }
    }
    agent = walk_step(chain, agent, walk_rng);
  }

  trace.iterations = state.k;
  trace.comm_units = ledger.units;
  trace.sim_time = clock.sim_time;
  trace.final_mse = trace.rows.back().mse;
  trace.final_objective = prob.objective(state.x);
  if (state.cover_time >= 0) trace.cover_time = state.cover_time;
  return trace;
}

RunTrace run_walkman(const ConsensusProblem& prob, const TransitionMatrix& chain,
                     const WalkmanRunConfig& cfg, const StepObserver& observer) {
  double beta = cfg.beta > 0.0 ? cfg.beta : default_beta(prob, cfg.variant);
  WalkmanState state = init(prob, beta, cfg.init, cfg.variant);
  return run_walkman_from(std::move(state), prob, chain, cfg, observer);
}

}  // namespace walkman
