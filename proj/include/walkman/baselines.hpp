#ifndef WALKMAN_BASELINES_HPP_
#define WALKMAN_BASELINES_HPP_

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "walkman/graph.hpp"
#include "walkman/markov.hpp"
#include "walkman/problems.hpp"
#include "walkman/trace.hpp"
#include "walkman/walkman.hpp"

namespace walkman::baselines {

//! Metropolis-Hastings mixing matrix: symmetric, doubly stochastic,
//! supported on edges plus the diagonal.
Eigen::MatrixXd metropolis_weights(const Graph& g);

//! Step-size schedule for incremental methods: constant alpha or
//! min(a, b/k) with k counted from 1.
struct StepSchedule {
  double constant = 0.0;
  double decay_a = 0.0;
  double decay_b = 0.0;
  bool decaying = false;

  static StepSchedule Constant(double alpha);
  static StepSchedule Decaying(double a, double b);
  double at(long k) const;
};

struct IncrementalState {
  Eigen::VectorXd x;
  StepSchedule schedule;
  long k = 0;
};

IncrementalState init_incremental(const ConsensusProblem& prob, StepSchedule schedule);

//! x <- prox_{alpha_k r}(x - alpha_k grad f_{agent}(x)); plain gradient
//! descent when r is zero. Charges one token message.
void rw_incremental_step(IncrementalState& state, int agent,
                         const ConsensusProblem& prob);

struct ExtraState {
  Eigen::MatrixXd X;      // n x p iterates
  Eigen::MatrixXd Xprev;
  Eigen::MatrixXd W;      // mixing matrix
  Eigen::MatrixXd Wtilde; // (I + W)/2
  Eigen::MatrixXd Grad;   // row-wise local gradients at X
  Eigen::MatrixXd Gprev;
  Eigen::MatrixXd Waccum; // running w recursion for the proximal form
  double alpha = 0.0;
  bool with_prox_r = false;
  long k = 0;
};

ExtraState init_extra(const ConsensusProblem& prob, const Eigen::MatrixXd& W,
                      double alpha, bool with_prox_r);

//! One synchronous EXTRA (or PG-EXTRA when with_prox_r) round; 2m messages.
void extra_step(ExtraState& state, const ConsensusProblem& prob);

struct DiffusionState {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Psi;   // previous adapt output
  Eigen::MatrixXd Wbar;  // (I + W)/2 combination matrix
  double alpha = 0.0;
  long k = 0;
};

DiffusionState init_exact_diffusion(const ConsensusProblem& prob,
                                    const Eigen::MatrixXd& W, double alpha);

//! One adapt-correct-combine round; 2m messages.
void exact_diffusion_step(DiffusionState& state, const ConsensusProblem& prob);

struct DadmmState {
  Eigen::MatrixXd X;      // per-agent primal copies
  Eigen::MatrixXd Duals;  // per-agent accumulated duals
  std::vector<std::vector<int>> adjacency;
  std::vector<int> degrees;
  double beta = 0.0;
  long k = 0;
};

DadmmState init_dadmm(const ConsensusProblem& prob, const Graph& g, double beta);

//! One edge-based decentralized ADMM round: per-agent composite prox of
//! f_i + r plus neighbor exchanges; 2m messages.
void dadmm_step(DadmmState& state, const ConsensusProblem& prob);

//! argmin_x f(x) + r(x) + (beta/2)||x - v||^2 via an inner proximal-gradient
//! loop (closed form when r is zero).
Eigen::VectorXd composite_prox(const LocalObjective& f, const Regularizer& r,
                               const Eigen::VectorXd& v, double beta,
                               double lipschitz);

enum class GossipAlgo { Extra, PgExtra, ExactDiffusion, DAdmm };

struct GossipRunConfig {
  GossipAlgo algo = GossipAlgo::Extra;
  double alpha = 0.0;  // step size (EXTRA family / exact diffusion)
  double beta = 1.0;   // penalty (D-ADMM)
  std::optional<Eigen::MatrixXd> start;  // per-agent initial iterates
  StopRule stop;
  long record_every = 10;
  std::uint64_t latency_seed = 1;
};

//! Synchronous gossip run; error metric uses the mean iterate.
RunTrace run_gossip(const ConsensusProblem& prob, const Graph& g,
                    const GossipRunConfig& cfg);

struct IncrementalRunConfig {
  StepSchedule schedule;
  bool with_prox_r = true;
  int start = 0;
  std::optional<Eigen::VectorXd> x0;  // initial token (defaults to zero)
  StopRule stop;
  long record_every = 10;
  std::uint64_t walk_seed = 0;
  std::uint64_t latency_seed = 1;
};

//! Random-walk incremental (proximal) gradient run over the chain.
RunTrace run_incremental(const ConsensusProblem& prob, const TransitionMatrix& chain,
                         const IncrementalRunConfig& cfg);

}  // namespace walkman::baselines

#endif  // WALKMAN_BASELINES_HPP_
