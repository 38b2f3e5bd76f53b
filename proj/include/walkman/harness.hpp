#ifndef WALKMAN_HARNESS_HPP_
#define WALKMAN_HARNESS_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "walkman/baselines.hpp"
#include "walkman/graph.hpp"
#include "walkman/markov.hpp"
#include "walkman/problems.hpp"
#include "walkman/trace.hpp"
#include "walkman/walkman.hpp"

namespace walkman::harness {

// Algorithm tags accepted in configs:
//   walkman-prox, walkman-grad, rw-inc-const, rw-inc-decay, rw-prox-grad,
//   extra, pg-extra, exact-diffusion, d-admm
bool is_known_algorithm(const std::string& tag);

struct AlgoConfig {
  std::string tag;
  std::optional<double> beta;   // walkman variants, d-admm; unset -> default
  std::optional<double> alpha;  // step size
  double decay_a = 0.01;        // decaying schedule min(a, b/k)
  double decay_b = 5.0;
  // walkman start: zeros | stationary-local | ls-closed-form | random.
  // Unset picks zeros, except on the NN-PCA family where every algorithm
  // starts from a shared random feasible point (zero is a saddle fixed
  // point of all of them there).
  std::optional<std::string> init;
  std::vector<double> grid;     // candidates for grid search
};

struct ExperimentConfig {
  GraphSpec graph;
  ChainKind chain_kind = ChainKind::Simple;
  bool chain_lazy = false;

  ProblemFamily family = ProblemFamily::LeastSquares;
  int rows = 5;          // least squares
  int p = 10;
  int b_samples = 10;    // logistic / nnpca
  double noise = 0.1;    // least squares
  double lambda = 0.01;  // logistic l1 weight
  double spike = 5.0;    // synthetic nnpca spike variance
  std::string idx_images;
  std::string idx_labels;

  std::uint64_t seed_data = 2;
  std::uint64_t seed_latency = 7;
  std::vector<std::uint64_t> seeds_walk = {3};

  int start = 0;
  StopRule stop;
  long record_every = 10;
  std::string output = "out";
  std::vector<AlgoConfig> algorithms;

  //! Stable canonical text used for the manifest hash.
  std::string canonical() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

//! Built-in experiment presets: ls50, logreg, nnpca.
ExperimentConfig preset(const std::string& name);

ConsensusProblem build_problem(const ExperimentConfig& cfg);

struct AlgoSummary {
  std::string tag;
  std::uint64_t walk_seed = 0;
  std::string csv;  // file name, empty when the run errored
  std::string error;
  std::string status;
  long iterations = 0;
  double comm_units = 0.0;
  double sim_time = 0.0;
  std::optional<double> final_error;
  std::map<std::string, double> resolved;  // resolved beta / alpha
  std::string resolved_init;               // walkman start mode
};

struct ExperimentResult {
  std::string manifest_path;
  std::vector<AlgoSummary> summaries;
  std::uint64_t config_hash = 0;
};

//! Run every (algorithm, walk seed) job, one CSV per job plus a manifest.
//! Jobs run in a small worker pool; outputs are written atomically and are
//! identical for identical configs.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                bool emit_gnuplot = false);

//! Run one (algorithm, seed) job in memory.
RunTrace run_algorithm(const ConsensusProblem& prob, const Graph& g,
                       const TransitionMatrix& chain, const AlgoConfig& algo,
                       const ExperimentConfig& cfg, std::uint64_t walk_seed,
                       std::uint64_t latency_seed);

struct GridPoint {
  double value = 0.0;
  std::optional<double> final_error;  // unset when the run diverged
};

struct GridResult {
  double best = 0.0;
  std::vector<GridPoint> points;
};

//! Evaluate the grid at a fixed communication budget and return the
//! parameter with the smallest final error; ties break toward the smaller
//! step size (larger beta for penalty methods).
GridResult grid_search(const ExperimentConfig& cfg, const std::string& algo_tag,
                       const std::vector<double>& grid);

}  // namespace walkman::harness

#endif  // WALKMAN_HARNESS_HPP_
