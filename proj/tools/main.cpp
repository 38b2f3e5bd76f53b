// Command-line front end: graph generation, experiment runs, grid search,
// and the communication-complexity comparison table.

#include <CLI11.hpp>
#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "walkman/harness.hpp"
#include "walkman/theory.hpp"

namespace {

using namespace walkman;

GraphSpec parse_graph_spec(const std::string& text, std::uint64_t seed) {
  GraphSpec spec;
  spec.seed = seed;
  auto colon = text.find(':');
  std::string family = text.substr(0, colon);
  if (family == "complete") spec.family = GraphFamily::Complete;
  else if (family == "cycle") spec.family = GraphFamily::Cycle;
  else if (family == "gilbert") spec.family = GraphFamily::Gilbert;
  else if (family == "geometric") spec.family = GraphFamily::Geometric;
  else throw ParameterError("unknown graph family: " + family);
  if (colon == std::string::npos) throw ParameterError("graph spec needs n=<count>");
  std::stringstream rest(text.substr(colon + 1));
  std::string kv;
  while (std::getline(rest, kv, ',')) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParameterError("bad graph spec item: " + kv);
    std::string key = kv.substr(0, eq);
    double value = std::stod(kv.substr(eq + 1));
    if (key == "n") spec.n = static_cast<int>(value);
    else if (key == "p") spec.p = value;
    else if (key == "side") spec.side = value;
    else if (key == "radius") spec.radius = value;
    else throw ParameterError("unknown graph spec key: " + key);
  }
  return spec;
}

int cmd_gen_graph(const std::string& spec_text, std::uint64_t seed,
                  const std::string& output) {
  GraphSpec spec = parse_graph_spec(spec_text, seed);
  Graph g = generate(spec);
  save_edge_list_file(g, output);
  std::printf("wrote %s: n=%d m=%d connected=%s\n", output.c_str(), g.n,
              g.num_edges(), is_connected(g) ? "yes" : "no");
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& preset_name,
            const std::string& output_override, bool gnuplot) {
  harness::ExperimentConfig cfg;
  if (!preset_name.empty()) cfg = harness::preset(preset_name);
  else cfg = harness::load_config(config_path);
  if (!output_override.empty()) cfg.output = output_override;
  harness::ExperimentResult result = harness::run_experiment(cfg, gnuplot);
  std::printf("manifest: %s\n", result.manifest_path.c_str());
  bool any_error = false;
  for (const auto& s : result.summaries) {
    if (!s.error.empty()) {
      any_error = true;
      std::printf("%-16s seed %" PRIu64 "  error: %s\n", s.tag.c_str(), s.walk_seed,
                  s.error.c_str());
      continue;
    }
    std::printf("%-16s seed %" PRIu64 "  status=%s iters=%ld comm=%.0f", s.tag.c_str(),
                s.walk_seed, s.status.c_str(), s.iterations, s.comm_units);
    if (s.final_error) std::printf(" final_error=%.3e", *s.final_error);
    std::printf("\n");
  }
  return any_error ? 1 : 0;
}

int cmd_grid(const std::string& config_path, const std::string& preset_name,
             const std::string& algo, const std::string& grid_arg) {
  harness::ExperimentConfig cfg;
  if (!preset_name.empty()) cfg = harness::preset(preset_name);
  else cfg = harness::load_config(config_path);
  std::vector<double> grid;
  if (!grid_arg.empty()) {
    std::stringstream ss(grid_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
  } else {
    for (const auto& a : cfg.algorithms)
      if (a.tag == algo) grid = a.grid;
  }
  if (grid.empty()) throw ConfigError("grid: no grid given (flag or config)");
  harness::GridResult result = harness::grid_search(cfg, algo, grid);
  for (const auto& pt : result.points) {
    if (pt.final_error)
      std::printf("%-12g final_error=%.6e\n", pt.value, *pt.final_error);
    else
      std::printf("%-12g diverged\n", pt.value);
  }
  std::printf("best: %g\n", result.best);
  return 0;
}

int cmd_theory(const std::string& graph_path, double eps, const std::string& kind_name,
               const std::string& csv_path) {
  Graph g = load_edge_list_file(graph_path);
  ChainKind kind = kind_name == "simple" ? ChainKind::Simple : ChainKind::MaxDegree;
  TransitionMatrix chain = build_chain(g, kind);
  if (chain.periodic_warning) chain = lazify(chain);
  ChainStats stats = chain_stats(chain, 0.5);
  double lambda2 = stats.lambda2_second.value_or(stats.sigma);

  theory::ComplexityInputs in;
  in.n = g.n;
  in.m = g.num_edges();
  in.lambda2 = std::max(0.0, lambda2);
  in.pi_star = stats.pi_star;
  in.epsilon = eps;
  auto degrees = g.degrees();
  in.d_min = *std::min_element(degrees.begin(), degrees.end());

  theory::WalkmanComm wc = theory::walkman_comm(in);
  struct Row {
    std::string name;
    double value;
  };
  std::vector<Row> rows;
  rows.push_back({"walkman (exact epochs x tau)", wc.exact});
  rows.push_back({"walkman (simplified order)", wc.simplified});
  for (auto algo : {theory::BaselineAlgo::DAdmm, theory::BaselineAlgo::Extra,
                    theory::BaselineAlgo::ExactDiffusion, theory::BaselineAlgo::Esdacd,
                    theory::BaselineAlgo::RwAdmm})
    rows.push_back({theory::to_string(algo), theory::baseline_comm(in, algo)});
  rows.push_back({"walkman nonconvex (1/eps)", theory::walkman_comm_nonconvex(in)});

  std::printf("graph: n=%d m=%ld lambda2=%.6f pi*=%.6f eps=%g\n", in.n, in.m,
              in.lambda2, in.pi_star, eps);
  std::printf("%-32s %16s\n", "algorithm", "comm units");
  for (const auto& row : rows) std::printf("%-32s %16.4e\n", row.name.c_str(), row.value);
  std::printf("walkman-favored threshold (lambda2 <= 1 - ln^{4/3}(n)/m^{2/3}): %s\n",
              theory::walkman_favored(in.n, in.m, in.lambda2) ? "yes" : "no");
  std::printf("note: unit constants only; use for ordering and thresholds, not "
              "absolute counts. D-GPDA/xFILTER nonconvex orders: n^2/eps on the "
              "complete and cycle graphs.\n");

  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw DataError("cannot open for writing: " + csv_path);
    out << "algorithm,comm_units\n";
    for (const auto& row : rows) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", row.value);
      out << row.name << ',' << buf << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random-walk decentralized consensus optimization simulator"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-graph", "generate a graph and write an edge list");
  std::string spec_text;
  std::uint64_t seed = 0;
  std::string output = "edges.txt";
  gen->add_option("spec", spec_text,
                  "family:key=val,... e.g. geometric:n=50,side=30,radius=15")
      ->required();
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("-o,--output", output, "output path");

  auto* run = app.add_subcommand("run", "run a config-driven experiment");
  std::string config_path, preset_name, out_dir;
  bool gnuplot = false;
  run->add_option("-c,--config", config_path, "config file");
  run->add_option("--preset", preset_name, "built-in preset: ls50 | logreg | nnpca");
  run->add_option("-o,--output", out_dir, "output directory override");
  run->add_flag("--gnuplot", gnuplot, "also emit a gnuplot script");

  auto* grid = app.add_subcommand("grid", "grid-search one algorithm parameter");
  std::string grid_config, grid_preset, grid_algo, grid_values;
  grid->add_option("-c,--config", grid_config, "config file");
  grid->add_option("--preset", grid_preset, "built-in preset");
  grid->add_option("--algo", grid_algo, "algorithm tag")->required();
  grid->add_option("--grid", grid_values, "comma-separated candidate values");

  auto* theory_cmd = app.add_subcommand("theory", "communication-complexity table");
  std::string graph_path, kind_name = "max-degree", csv_path;
  double eps = 1e-6;
  theory_cmd->add_option("--graph", graph_path, "edge-list file")->required();
  theory_cmd->add_option("--eps", eps, "target accuracy");
  theory_cmd->add_option("--kind", kind_name, "chain kind: simple | max-degree");
  theory_cmd->add_option("--csv", csv_path, "also write the table as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_graph(spec_text, seed, output);
    if (run->parsed()) {
      if (config_path.empty() && preset_name.empty())
        throw walkman::ConfigError("run: need --config or --preset");
      return cmd_run(config_path, preset_name, out_dir, gnuplot);
    }
    if (grid->parsed()) {
      if (grid_config.empty() && grid_preset.empty())
        throw walkman::ConfigError("grid: need --config or --preset");
      return cmd_grid(grid_config, grid_preset, grid_algo, grid_values);
    }
    if (theory_cmd->parsed()) return cmd_theory(graph_path, eps, kind_name, csv_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
