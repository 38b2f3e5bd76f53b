#ifndef WALKMAN_WALKMAN_HPP_
#define WALKMAN_WALKMAN_HPP_

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "walkman/markov.hpp"
#include "walkman/problems.hpp"
#include "walkman/trace.hpp"

namespace walkman {

enum class Variant { Prox, Gradient };
enum class InitMode { Zeros, StationaryLocal, LsClosedForm };

//! Token-passing state. The token xbar is the only quantity communicated;
//! it always equals (1/n) sum_i (y_i - z_i/beta), maintained incrementally.
struct WalkmanState {
  Eigen::VectorXd xbar;  // token
  Eigen::VectorXd x;     // current primal
  Eigen::MatrixXd Y;     // n x p stacked local variables
  Eigen::MatrixXd Z;     // n x p stacked duals
  double beta = 0.0;
  long k = 0;
  Variant variant = Variant::Prox;
  // Iteration of each agent's most recent visit (-1 before the first one).
  std::vector<long> last_update;
  // ||y_i after - y_i before||^2 for each agent's latest visit.
  Eigen::VectorXd last_disp_sq;
  // y_i value at the start of its latest visit.
  Eigen::MatrixXd Y_prev_visit;
  long cover_time = -1;  // first iteration by which all agents were visited

  int n() const { return static_cast<int>(Y.rows()); }
  int p() const { return static_cast<int>(Y.cols()); }
  bool all_visited() const { return cover_time >= 0; }
  //! Residual of the token identity xbar - (1/n) sum_i (y_i - z_i/beta).
  double token_residual() const;
};

struct StepInfo {
  int agent = -1;
  Eigen::VectorXd dy;  // y_i change at this step
  Eigen::VectorXd dz;  // z_i change at this step
};

//! Stopping rule; at a recorded iteration the criteria are evaluated in the
//! order mse_tol, grad_tol, max_iters and the first satisfied one wins.
struct StopRule {
  std::optional<long> max_iters;
  std::optional<double> mse_tol;   // on relative MSE (x* required)
  std::optional<double> grad_tol;  // on the subgradient squared norm
};

struct WalkmanRunConfig {
  double beta = 0.0;  // <= 0 selects default_beta
  Variant variant = Variant::Prox;
  InitMode init = InitMode::Zeros;
  int start = 0;
  StopRule stop;
  long record_every = 10;
  std::uint64_t walk_seed = 0;
  std::uint64_t latency_seed = 1;
};

using StepObserver =
    std::function<void(const WalkmanState& state, const StepInfo& info)>;

//! Penalty satisfying the convergence conditions for the variant, with a
//! small margin: prox max{gamma, 2L+2}, gradient max{gamma, 2L^2+L+2};
//! least squares additionally max{., 2 sigma*_max + 2}.
double default_beta(const ConsensusProblem& prob, Variant variant,
                    double margin = 1e-3);

WalkmanState init(const ConsensusProblem& prob, double beta, InitMode mode,
                  Variant variant = Variant::Prox);

//! Build a state from explicit local variables (token set consistently).
WalkmanState make_state(const ConsensusProblem& prob, double beta, Variant variant,
                        const Eigen::MatrixXd& Y0, const Eigen::MatrixXd& Z0);

//! One Walkman update at the visited agent; O(p) plus the local prox/grad.
StepInfo step(WalkmanState& state, int agent, const ConsensusProblem& prob);

RunTrace run_walkman(const ConsensusProblem& prob, const TransitionMatrix& chain,
                     const WalkmanRunConfig& cfg, const StepObserver& observer = {});

//! Run from a prepared state (custom initializations).
RunTrace run_walkman_from(WalkmanState state, const ConsensusProblem& prob,
                          const TransitionMatrix& chain, const WalkmanRunConfig& cfg,
                          const StepObserver& observer = {});

}  // namespace walkman

#endif  // WALKMAN_WALKMAN_HPP_
