#ifndef WALKMAN_MARKOV_HPP_
#define WALKMAN_MARKOV_HPP_

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "walkman/common.hpp"
#include "walkman/graph.hpp"

namespace walkman {

enum class ChainKind {
  Simple,    // P_ij = 1/d_i on edges, 0 elsewhere
  MaxDegree  // P_ij = A_ij/d_max off-diagonal, diagonal fills the remainder
};

struct TransitionMatrix {
  Eigen::MatrixXd P;
  ChainKind kind = ChainKind::Simple;
  // Simple kind on a bipartite graph never mixes; flagged at build time.
  bool periodic_warning = false;

  int n() const { return static_cast<int>(P.rows()); }
  bool is_symmetric(double tol = 1e-12) const;
};

struct SpectralInfo {
  // Operator norm of P restricted to the subspace orthogonal to the
  // all-ones vector.
  double sigma = 0.0;
  // max |eigenvalue| over eigenvalues != 1; symmetric P only (equals sigma).
  std::optional<double> lambda2;
  // Second largest eigenvalue by value; symmetric P only. This is the
  // quantity with the 1 - cos(2*pi/n) gap on cycles.
  std::optional<double> lambda2_second;
};

struct ChainStats {
  Eigen::VectorXd pi;
  double pi_star = 0.0;
  double sigma = 0.0;
  std::optional<double> lambda2;
  std::optional<double> lambda2_second;
  double delta = 0.5;
  int tau = 0;  // mixing-time bound at delta
};

struct WalkResult {
  std::vector<int> nodes;  // i_0 .. i_steps
  // First iteration index by which every node has been visited; unset when
  // the walk ended before covering the graph.
  std::optional<long> cover_time;
};

//! Build a transition matrix over a connected graph.
TransitionMatrix build_chain(const Graph& g, ChainKind kind);

//! Lazy version (P + I)/2; restores aperiodicity on bipartite graphs.
TransitionMatrix lazify(const TransitionMatrix& tm);

//! Stationary distribution: pi^T P = pi^T, entries positive, sums to 1.
Eigen::VectorXd stationary(const TransitionMatrix& tm);

SpectralInfo spectral(const TransitionMatrix& tm);

//! ceil( ln(sqrt(2)/(delta*pi_star)) / (1 - sigma(P)) ). Throws ChainError
//! when sigma(P) >= 1 (periodic or reducible chain).
int mixing_time(const TransitionMatrix& tm, double delta);

//! Check by explicit matrix powering that every row of P^tau is within
//! delta*pi_star of pi in Euclidean norm.
bool verify_mixing(const TransitionMatrix& tm, double delta, int tau);

//! Sample a random walk of `steps` transitions starting at `start`.
WalkResult sample_walk(const TransitionMatrix& tm, int start, long steps, Rng& rng);

//! Convenience bundle: stationary + spectral + mixing-time bound.
ChainStats chain_stats(const TransitionMatrix& tm, double delta = 0.5);

//! One walk transition from `state`, drawn from row `state` of P.
int walk_step(const TransitionMatrix& tm, int state, Rng& rng);

}  // namespace walkman

#endif  // WALKMAN_MARKOV_HPP_
