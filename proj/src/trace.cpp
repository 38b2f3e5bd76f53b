#include "walkman/trace.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "walkman/common.hpp"

namespace walkman {

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::MaxIters: return "max-iters";
    case RunStatus::MseTol: return "mse-tol";
    case RunStatus::GradTol: return "grad-tol";
    case RunStatus::Diverged: return "diverged";
  }
  return "unknown";
}

namespace {
void append_field(std::string& line, const std::optional<double>& v) {
  line.push_back(',');
  if (v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", *v);
    line += buf;
  }
}
}  // namespace

void write_csv(const RunTrace& trace, std::ostream& out) {
  out << "k,comm_units,sim_time,mse,L_beta,M_beta,h_beta,grad_g_sq,nnpca_gap\n";
  for (const auto& row : trace.rows) {
    char head[96];
    std::snprintf(head, sizeof(head), "%ld,%.17g,%.17g", row.k, row.comm_units,
                  row.sim_time);
    std::string line = head;
    append_field(line, row.mse);
    append_field(line, row.L_beta);
    append_field(line, row.M_beta);
    append_field(line, row.h_beta);
    append_field(line, row.grad_g_sq);
    append_field(line, row.nnpca_gap);
    out << line << '\n';
  }
}

void write_csv_file(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  write_csv(trace, out);
}

}  // namespace walkman
