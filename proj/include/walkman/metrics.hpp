#ifndef WALKMAN_METRICS_HPP_
#define WALKMAN_METRICS_HPP_

#include <Eigen/Dense>

#include "walkman/common.hpp"
#include "walkman/problems.hpp"
#include "walkman/walkman.hpp"

namespace walkman {

//! Cumulative count of p-vector transmissions.
struct CommLedger {
  double units = 0.0;
  void charge(double u) {
    if (u < 0.0) throw ParameterError("ledger: negative charge");
    units += u;
  }
};

//! Communication time of one synchronous round: the max of `num_transmissions`
//! iid Exp(1) latencies (a single draw for sequential algorithms).
double round_time(int num_transmissions, Rng& rng);

//! Simulated clock fed by an Exp(1) latency model.
struct ClockModel {
  double sim_time = 0.0;
  Rng rng;
  explicit ClockModel(std::uint64_t seed = 0) : rng(seed) {}
  void advance(int num_transmissions) { sim_time += round_time(num_transmissions, rng); }
};

//! r(x) + (1/n) [ F(Y) + <Z, 1 (x) x - Y> + (beta/2) ||1 (x) x - Y||^2 ]
double augmented_lagrangian(const Eigen::VectorXd& x, const Eigen::MatrixXd& Y,
                            const Eigen::MatrixXd& Z, double beta,
                            const ConsensusProblem& prob);

enum class LyapunovKind { L, M };

//! L evaluates the augmented Lagrangian on the state's aligned triple;
//! M adds the per-agent last-visit displacement term and is only defined
//! for the gradient variant.
double lyapunov(const WalkmanState& state, const ConsensusProblem& prob,
                LyapunovKind which);

//! Least-squares Lyapunov function of the stacked local variables.
double h_beta(const Eigen::MatrixXd& Y, const ConsensusProblem& prob, double beta);

Eigen::VectorXd h_beta_grad(const Eigen::MatrixXd& Y, const ConsensusProblem& prob,
                            double beta);

//! Dense np x np Hessian of h_beta.
Eigen::MatrixXd h_beta_hessian(const ConsensusProblem& prob, double beta);

//! Squared norm of the Lagrangian subgradient at the post-step state; the
//! x-component uses the step's y/z displacements at the visited agent.
double subgrad_norm_sq(const WalkmanState& state, const StepInfo& info,
                       const ConsensusProblem& prob);

//! Stationarity residual plus consensus violation for the nonneg-ball
//! constrained eigenvector problem. The first term is the squared distance
//! from -grad f(x) to the normal cone of {x >= 0, ||x|| <= 1} at x.
double nnpca_optimality_gap(const Eigen::VectorXd& x, const Eigen::MatrixXd& Y,
                            const ConsensusProblem& prob);

//! Variant for token-only algorithms (consensus term identically zero).
double nnpca_optimality_gap(const Eigen::VectorXd& x, const ConsensusProblem& prob);

//! Squared distance from v to the normal cone of {x >= 0, ||x|| <= 1} at x.
double distance_sq_to_normal_cone(const Eigen::VectorXd& v, const Eigen::VectorXd& x);

}  // namespace walkman

#endif  // WALKMAN_METRICS_HPP_
