#ifndef WALKMAN_TRACE_HPP_
#define WALKMAN_TRACE_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace walkman {

enum class RunStatus { MaxIters, MseTol, GradTol, Diverged };

std::string to_string(RunStatus s);

struct TraceRow {
  long k = 0;
  double comm_units = 0.0;
  double sim_time = 0.0;
  std::optional<double> mse;        // ||x - x*||^2 / ||x*||^2 when x* known
  std::optional<double> L_beta;
  std::optional<double> M_beta;     // gradient variant
  std::optional<double> h_beta;     // least squares
  std::optional<double> grad_g_sq;  // squared norm of the Lagrangian subgradient
  std::optional<double> nnpca_gap;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  RunStatus status = RunStatus::MaxIters;
  long iterations = 0;
  double comm_units = 0.0;
  double sim_time = 0.0;
  std::optional<double> final_mse;
  std::optional<double> final_objective;  // r + (1/n) sum f_i at the last iterate
  std::optional<long> cover_time;

  const TraceRow& last() const { return rows.back(); }
};

// CSV schema shared by all algorithms:
// k,comm_units,sim_time,mse,L_beta,M_beta,h_beta,grad_g_sq,nnpca_gap
void write_csv(const RunTrace& trace, std::ostream& out);
void write_csv_file(const RunTrace& trace, const std::string& path);

}  // namespace walkman

#endif  // WALKMAN_TRACE_HPP_
