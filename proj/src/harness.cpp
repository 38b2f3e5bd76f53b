#include "walkman/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace walkman::harness {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kAlgorithms = {
    "walkman-prox", "walkman-grad", "rw-inc-const",    "rw-inc-decay",
    "rw-prox-grad", "extra",        "pg-extra",        "exact-diffusion",
    "d-admm"};

bool is_gossip(const std::string& tag) {
  return tag == "extra" || tag == "pg-extra" || tag == "exact-diffusion" ||
         tag == "d-admm";
}

bool is_walkman(const std::string& tag) {
  return tag == "walkman-prox" || tag == "walkman-grad";
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  auto end = s.find_last_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + key + ": " + v);
  }
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer for " + key + ": " + v);
  }
}

GraphFamily parse_family(const std::string& v) {
  if (v == "complete") return GraphFamily::Complete;
  if (v == "cycle") return GraphFamily::Cycle;
  if (v == "gilbert") return GraphFamily::Gilbert;
  if (v == "geometric") return GraphFamily::Geometric;
  throw ConfigError("config: unknown graph family: " + v);
}

std::string family_name(GraphFamily f) {
  switch (f) {
    case GraphFamily::Complete: return "complete";
    case GraphFamily::Cycle: return "cycle";
    case GraphFamily::Gilbert: return "gilbert";
    case GraphFamily::Geometric: return "geometric";
  }
  return "?";
}

std::string problem_name(ProblemFamily f) {
  switch (f) {
    case ProblemFamily::LeastSquares: return "least-squares";
    case ProblemFamily::Logistic: return "logistic";
    case ProblemFamily::NnPca: return "nnpca";
    case ProblemFamily::Custom: return "custom";
  }
  return "?";
}

AlgoConfig* find_algo(ExperimentConfig& cfg, const std::string& tag) {
  for (auto& a : cfg.algorithms)
    if (a.tag == tag) return &a;
  return nullptr;
}

}  // namespace

bool is_known_algorithm(const std::string& tag) { return kAlgorithms.count(tag) > 0; }

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  cfg.algorithms.clear();
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");

    if (key == "graph.family") cfg.graph.family = parse_family(value);
    else if (key == "graph.n") cfg.graph.n = static_cast<int>(parse_long(key, value));
    else if (key == "graph.p") cfg.graph.p = parse_double(key, value);
    else if (key == "graph.side") cfg.graph.side = parse_double(key, value);
    else if (key == "graph.radius") cfg.graph.radius = parse_double(key, value);
    else if (key == "graph.seed") cfg.graph.seed = parse_long(key, value);
    else if (key == "chain.kind") {
      if (value == "simple") cfg.chain_kind = ChainKind::Simple;
      else if (value == "max-degree") cfg.chain_kind = ChainKind::MaxDegree;
      else throw ConfigError("config: unknown chain kind: " + value);
    } else if (key == "chain.lazy") {
      if (value == "true") cfg.chain_lazy = true;
      else if (value == "false") cfg.chain_lazy = false;
      else throw ConfigError("config: chain.lazy must be true or false");
    } else if (key == "problem.family") {
      if (value == "least-squares") cfg.family = ProblemFamily::LeastSquares;
      else if (value == "logistic") cfg.family = ProblemFamily::Logistic;
      else if (value == "nnpca") cfg.family = ProblemFamily::NnPca;
      else throw ConfigError("config: unknown problem family: " + value);
    } else if (key == "problem.rows") cfg.rows = static_cast<int>(parse_long(key, value));
    else if (key == "problem.p") cfg.p = static_cast<int>(parse_long(key, value));
    else if (key == "problem.b") cfg.b_samples = static_cast<int>(parse_long(key, value));
    else if (key == "problem.noise") cfg.noise = parse_double(key, value);
    else if (key == "problem.lambda") cfg.lambda = parse_double(key, value);
    else if (key == "problem.spike") cfg.spike = parse_double(key, value);
    else if (key == "problem.idx_images") cfg.idx_images = value;
    else if (key == "problem.idx_labels") cfg.idx_labels = value;
    else if (key == "seeds.data") cfg.seed_data = parse_long(key, value);
    else if (key == "seeds.latency") cfg.seed_latency = parse_long(key, value);
    else if (key == "seeds.walk") {
      cfg.seeds_walk.clear();
      for (const auto& tok : split(value, ','))
        cfg.seeds_walk.push_back(parse_long(key, tok));
      if (cfg.seeds_walk.empty()) throw ConfigError("config: seeds.walk is empty");
    } else if (key == "start") cfg.start = static_cast<int>(parse_long(key, value));
    else if (key == "stop.max_iters") cfg.stop.max_iters = parse_long(key, value);
    else if (key == "stop.mse_tol") cfg.stop.mse_tol = parse_double(key, value);
    else if (key == "stop.grad_tol") cfg.stop.grad_tol = parse_double(key, value);
    else if (key == "record_every") cfg.record_every = parse_long(key, value);
    else if (key == "output") cfg.output = value;
    else if (key == "algorithms") {
      for (const auto& tag : split(value, ',')) {
        if (!is_known_algorithm(tag)) throw ConfigError("config: unknown algorithm: " + tag);
        if (find_algo(cfg, tag)) throw ConfigError("config: duplicate algorithm: " + tag);
        AlgoConfig a;
        a.tag = tag;
        cfg.algorithms.push_back(a);
      }
    } else if (key.rfind("algo.", 0) == 0) {
      auto rest = key.substr(5);
      auto dot = rest.find('.');
      if (dot == std::string::npos)
        throw ConfigError("config: expected algo.<name>.<param>: " + key);
      std::string tag = rest.substr(0, dot);
      std::string param = rest.substr(dot + 1);
      if (!is_known_algorithm(tag)) throw ConfigError("config: unknown algorithm: " + tag);
      AlgoConfig* a = find_algo(cfg, tag);
      if (!a)
        throw ConfigError("config: " + tag + " not listed in `algorithms`");
      if (param == "beta") {
        if (value != "auto") a->beta = parse_double(key, value);
      } else if (param == "alpha") a->alpha = parse_double(key, value);
      else if (param == "a") a->decay_a = parse_double(key, value);
      else if (param == "b") a->decay_b = parse_double(key, value);
      else if (param == "init") {
        if (value != "zeros" && value != "stationary-local" &&
            value != "ls-closed-form" && value != "random")
          throw ConfigError("config: unknown init mode: " + value);
        a->init = value;
      } else if (param == "grid") {
        a->grid.clear();
        for (const auto& tok : split(value, ',')) a->grid.push_back(parse_double(key, tok));
      } else {
        throw ConfigError("config: unknown algorithm parameter: " + key);
      }
    } else {
      throw ConfigError("config: unknown key: " + key);
    }
  }
  if (cfg.graph.n <= 0) throw ConfigError("config: graph.n must be set");
  if (cfg.record_every < 1) throw ConfigError("config: record_every must be >= 1");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream out;
  out << "graph.family = " << family_name(graph.family) << '\n';
  out << "graph.n = " << graph.n << '\n';
  if (graph.family == GraphFamily::Gilbert)
    out << "graph.p = " << format_double(graph.p) << '\n';
  if (graph.family == GraphFamily::Geometric) {
    out << "graph.side = " << format_double(graph.side) << '\n';
    out << "graph.radius = " << format_double(graph.radius) << '\n';
  }
  out << "graph.seed = " << graph.seed << '\n';
  out << "chain.kind = " << (chain_kind == ChainKind::Simple ? "simple" : "max-degree")
      << '\n';
  out << "chain.lazy = " << (chain_lazy ? "true" : "false") << '\n';
  out << "problem.family = " << problem_name(family) << '\n';
  out << "problem.p = " << p << '\n';
  switch (family) {
    case ProblemFamily::LeastSquares:
      out << "problem.rows = " << rows << '\n';
      out << "problem.noise = " << format_double(noise) << '\n';
      break;
    case ProblemFamily::Logistic:
      out << "problem.b = " << b_samples << '\n';
      out << "problem.lambda = " << format_double(lambda) << '\n';
      break;
    case ProblemFamily::NnPca:
      out << "problem.b = " << b_samples << '\n';
      if (idx_images.empty()) out << "problem.spike = " << format_double(spike) << '\n';
      else {
        out << "problem.idx_images = " << idx_images << '\n';
        out << "problem.idx_labels = " << idx_labels << '\n';
      }
      break;
    case ProblemFamily::Custom:
      break;
  }
  out << "seeds.data = " << seed_data << '\n';
  out << "seeds.latency = " << seed_latency << '\n';
  out << "seeds.walk =";
  for (std::size_t i = 0; i < seeds_walk.size(); ++i)
    out << (i ? "," : " ") << seeds_walk[i];
  out << '\n';
  out << "start = " << start << '\n';
  if (stop.max_iters) out << "stop.max_iters = " << *stop.max_iters << '\n';
  if (stop.mse_tol) out << "stop.mse_tol = " << format_double(*stop.mse_tol) << '\n';
  if (stop.grad_tol) out << "stop.grad_tol = " << format_double(*stop.grad_tol) << '\n';
  out << "record_every = " << record_every << '\n';
  for (const auto& a : algorithms) {
    out << "algo " << a.tag;
    if (a.beta) out << " beta=" << format_double(*a.beta);
    if (a.alpha) out << " alpha=" << format_double(*a.alpha);
    out << " a=" << format_double(a.decay_a) << " b=" << format_double(a.decay_b);
    out << " init=" << a.init.value_or("default") << '\n';
  }
  return out.str();
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.algorithms.clear();
  cfg.graph.family = GraphFamily::Geometric;
  cfg.graph.n = 50;
  cfg.graph.side = 30.0;
  cfg.graph.radius = 15.0;
  cfg.graph.seed = 1;
  cfg.chain_kind = ChainKind::Simple;
  cfg.seed_data = 2;
  cfg.seed_latency = 7;
  cfg.seeds_walk = {3};
  cfg.record_every = 10;

  auto add = [&cfg](const std::string& tag) {
    AlgoConfig a;
    a.tag = tag;
    cfg.algorithms.push_back(a);
    return &cfg.algorithms.back();
  };

  if (name == "ls50") {
    cfg.family = ProblemFamily::LeastSquares;
    cfg.rows = 5;
    cfg.p = 10;
    cfg.noise = 0.1;
    cfg.stop.max_iters = 60000;
    cfg.stop.mse_tol = 1e-9;
    cfg.output = "out-ls50";
    add("walkman-prox")->init = "ls-closed-form";
    auto* wg = add("walkman-grad");
    wg->beta = 80.0;  // the theory default is far larger; tuned like the others
    auto* c = add("rw-inc-const");
    c->alpha = 0.001;
    add("rw-inc-decay");
    add("extra")->alpha = 0.02;
    add("exact-diffusion")->alpha = 0.02;
    add("d-admm")->beta = 2.0;
    return cfg;
  }
  if (name == "logreg") {
    cfg.family = ProblemFamily::Logistic;
    cfg.b_samples = 10;
    cfg.p = 5;
    cfg.lambda = 0.01;
    cfg.stop.max_iters = 30000;
    cfg.output = "out-logreg";
    add("walkman-prox");
    add("pg-extra")->alpha = 0.5;
    add("d-admm")->beta = 0.5;
    add("rw-prox-grad");
    return cfg;
  }
  if (name == "nnpca") {
    cfg.family = ProblemFamily::NnPca;
    cfg.graph.n = 10;
    cfg.b_samples = 100;
    cfg.p = 20;
    cfg.stop.max_iters = 30000;
    cfg.output = "out-nnpca";
    add("walkman-prox");  // starts from the shared random feasible point
    add("walkman-grad");
    add("rw-prox-grad");
    return cfg;
  }
  throw ConfigError("unknown preset: " + name);
}

ConsensusProblem build_problem(const ExperimentConfig& cfg) {
  Rng rng(cfg.seed_data);
  switch (cfg.family) {
    case ProblemFamily::LeastSquares:
      return gen_least_squares(cfg.graph.n, cfg.rows, cfg.p, cfg.noise, rng);
    case ProblemFamily::Logistic:
      return gen_logistic(cfg.graph.n, cfg.b_samples, cfg.p, cfg.lambda, rng);
    case ProblemFamily::NnPca: {
      NnPcaSource source;
      source.idx_images = cfg.idx_images;
      source.idx_labels = cfg.idx_labels;
      source.spike = cfg.spike;
      return gen_nnpca(cfg.graph.n, cfg.b_samples, cfg.p, source, rng);
    }
    case ProblemFamily::Custom:
      break;
  }
  throw ConfigError("config: cannot build a custom problem from a config file");
}

namespace {

// Shared random feasible start, used whenever zero is a fixed point of the
// whole iterate family (the NN-PCA saddle) or when a config asks for a
// random walkman start.
Eigen::MatrixXd random_start(const ConsensusProblem& prob, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd X(prob.n, prob.p);
  for (int i = 0; i < prob.n; ++i)
    for (int k = 0; k < prob.p; ++k) {
      double v = gauss(rng);
      X(i, k) = prob.family == ProblemFamily::NnPca ? 0.3 * std::abs(v) : 0.3 * v;
    }
  return X;
}

std::string resolved_init(const AlgoConfig& algo, const ConsensusProblem& prob) {
  if (algo.init) return *algo.init;
  return prob.family == ProblemFamily::NnPca ? "random" : "zeros";
}

}  // namespace

RunTrace run_algorithm(const ConsensusProblem& prob, const Graph& g,
                       const TransitionMatrix& chain, const AlgoConfig& algo,
                       const ExperimentConfig& cfg, std::uint64_t walk_seed,
                       std::uint64_t latency_seed) {
  const bool nnpca = prob.family == ProblemFamily::NnPca;
  const std::uint64_t start_seed = cfg.seed_data + 101;
  if (is_walkman(algo.tag)) {
    WalkmanRunConfig rc;
    rc.variant = algo.tag == "walkman-prox" ? Variant::Prox : Variant::Gradient;
    rc.beta = algo.beta.value_or(0.0);
    rc.start = cfg.start;
    rc.stop = cfg.stop;
    rc.record_every = cfg.record_every;
    rc.walk_seed = walk_seed;
    rc.latency_seed = latency_seed;
    std::string mode = resolved_init(algo, prob);
    if (mode == "random") {
      double beta = rc.beta > 0.0 ? rc.beta : default_beta(prob, rc.variant);
      Eigen::MatrixXd Y0 = random_start(prob, start_seed);
      Eigen::MatrixXd Z0(prob.n, prob.p);
      for (int i = 0; i < prob.n; ++i)
        Z0.row(i) = prob.local(i).grad(Y0.row(i).transpose()).transpose();
      WalkmanState state = make_state(prob, beta, rc.variant, Y0, Z0);
      return run_walkman_from(std::move(state), prob, chain, rc);
    }
    if (mode == "zeros") rc.init = InitMode::Zeros;
    else if (mode == "stationary-local") rc.init = InitMode::StationaryLocal;
    else rc.init = InitMode::LsClosedForm;
    return run_walkman(prob, chain, rc);
  }
  if (is_gossip(algo.tag)) {
    baselines::GossipRunConfig rc;
    if (algo.tag == "extra") rc.algo = baselines::GossipAlgo::Extra;
    else if (algo.tag == "pg-extra") rc.algo = baselines::GossipAlgo::PgExtra;
    else if (algo.tag == "exact-diffusion") rc.algo = baselines::GossipAlgo::ExactDiffusion;
    else rc.algo = baselines::GossipAlgo::DAdmm;
    rc.alpha = algo.alpha.value_or(1.0 / (2.0 * std::max(prob.lipschitz, 1e-12)));
    rc.beta = algo.beta.value_or(1.0);
    if (nnpca) rc.start = random_start(prob, start_seed);
    rc.stop = cfg.stop;
    rc.record_every = cfg.record_every;
    rc.latency_seed = latency_seed;
    return baselines::run_gossip(prob, g, rc);
  }
  // random-walk incremental family
  baselines::IncrementalRunConfig rc;
  if (algo.tag == "rw-inc-const") {
    rc.schedule = baselines::StepSchedule::Constant(algo.alpha.value_or(0.001));
  } else if (algo.alpha) {
    rc.schedule = baselines::StepSchedule::Constant(*algo.alpha);
  } else {
    rc.schedule = baselines::StepSchedule::Decaying(algo.decay_a, algo.decay_b);
  }
  if (nnpca)
    rc.x0 = random_start(prob, start_seed).colwise().mean().transpose();
  rc.start = cfg.start;
  rc.stop = cfg.stop;
  rc.record_every = cfg.record_every;
  rc.walk_seed = walk_seed;
  rc.latency_seed = latency_seed;
  return baselines::run_incremental(prob, chain, rc);
}

namespace {

struct Job {
  const AlgoConfig* algo;
  std::uint64_t walk_seed;
  std::uint64_t latency_seed;
  std::string csv_name;
};

void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + tmp);
    out << content;
  }
  fs::rename(tmp, path);
}

std::map<std::string, double> resolved_params(const AlgoConfig& algo,
                                              const ConsensusProblem& prob) {
  std::map<std::string, double> out;
  if (is_walkman(algo.tag)) {
    Variant v = algo.tag == "walkman-prox" ? Variant::Prox : Variant::Gradient;
    out["beta"] = algo.beta.value_or(default_beta(prob, v));
  } else if (algo.tag == "d-admm") {
    out["beta"] = algo.beta.value_or(1.0);
  } else if (algo.tag == "rw-inc-const") {
    out["alpha"] = algo.alpha.value_or(0.001);
  } else if (is_gossip(algo.tag)) {
    out["alpha"] = algo.alpha.value_or(1.0 / (2.0 * std::max(prob.lipschitz, 1e-12)));
  } else if (algo.alpha) {
    out["alpha"] = *algo.alpha;
  } else {
    out["decay_a"] = algo.decay_a;
    out["decay_b"] = algo.decay_b;
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, bool emit_gnuplot) {
  Graph g = generate(cfg.graph);
  TransitionMatrix chain = build_chain(g, cfg.chain_kind);
  if (cfg.chain_lazy) chain = lazify(chain);
  ConsensusProblem prob = build_problem(cfg);

  fs::create_directories(cfg.output);

  std::vector<Job> jobs;
  for (const auto& algo : cfg.algorithms) {
    for (std::size_t si = 0; si < cfg.seeds_walk.size(); ++si) {
      Job job;
      job.algo = &algo;
      job.walk_seed = cfg.seeds_walk[si];
      job.latency_seed = cfg.seed_latency + si;
      job.csv_name = algo.tag + "_s" + std::to_string(job.walk_seed) + ".csv";
      jobs.push_back(job);
    }
  }

  std::vector<AlgoSummary> summaries(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= jobs.size()) return;
      const Job& job = jobs[idx];
      AlgoSummary& summary = summaries[idx];
      summary.tag = job.algo->tag;
      summary.walk_seed = job.walk_seed;
      try {
        RunTrace trace = run_algorithm(prob, g, chain, *job.algo, cfg, job.walk_seed,
                                       job.latency_seed);
        std::ostringstream csv;
        write_csv(trace, csv);
        atomic_write(cfg.output + "/" + job.csv_name, csv.str());
        summary.csv = job.csv_name;
        summary.status = to_string(trace.status);
        summary.iterations = trace.iterations;
        summary.comm_units = trace.comm_units;
        summary.sim_time = trace.sim_time;
        if (trace.final_mse) summary.final_error = trace.final_mse;
        else if (!trace.rows.empty() && trace.rows.back().nnpca_gap)
          summary.final_error = trace.rows.back().nnpca_gap;
        else
          summary.final_error = trace.final_objective;
        summary.resolved = resolved_params(*job.algo, prob);
        if (is_walkman(job.algo->tag))
          summary.resolved_init = resolved_init(*job.algo, prob);
      } catch (const std::exception& e) {
        summary.error = e.what();
      }
    }
  };

  unsigned hw = std::thread::hardware_concurrency();
  std::size_t pool = std::min<std::size_t>(jobs.size(), hw > 0 ? hw : 1);
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < pool; ++t) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }

  // manifest
  ExperimentResult result;
  result.config_hash = fnv1a64(cfg.canonical());
  ChainStats stats = chain_stats(chain, 0.5);
  std::ostringstream man;
  char hash_hex[24];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(result.config_hash));
  man << "config_hash = " << hash_hex << '\n';
  man << "graph.n = " << g.n << '\n';
  man << "graph.m = " << g.num_edges() << '\n';
  man << "chain.sigma = " << format_double(stats.sigma) << '\n';
  if (stats.lambda2)
    man << "chain.lambda2 = " << format_double(*stats.lambda2) << '\n';
  if (stats.lambda2_second)
    man << "chain.lambda2_second = " << format_double(*stats.lambda2_second) << '\n';
  man << "chain.pi_star = " << format_double(stats.pi_star) << '\n';
  man << "chain.tau_half = " << stats.tau << '\n';
  man << "problem.family = " << problem_name(cfg.family) << '\n';
  man << "problem.p = " << prob.p << '\n';
  for (const auto& s : summaries) {
    man << "[" << s.tag << " seed " << s.walk_seed << "]\n";
    if (!s.error.empty()) {
      man << "error = " << s.error << '\n';
      continue;
    }
    for (const auto& [k, v] : s.resolved) man << k << " = " << format_double(v) << '\n';
    if (!s.resolved_init.empty()) man << "init = " << s.resolved_init << '\n';
    man << "csv = " << s.csv << '\n';
    man << "status = " << s.status << '\n';
    man << "iterations = " << s.iterations << '\n';
    man << "comm_units = " << format_double(s.comm_units) << '\n';
    man << "sim_time = " << format_double(s.sim_time) << '\n';
    if (s.final_error) man << "final_error = " << format_double(*s.final_error) << '\n';
  }
  result.manifest_path = cfg.output + "/manifest.txt";
  atomic_write(result.manifest_path, man.str());

  if (emit_gnuplot) {
    std::ostringstream gp;
    gp << "set logscale y\n";
    gp << "set xlabel 'communication units'\n";
    gp << "set ylabel 'relative MSE'\n";
    gp << "set datafile separator ','\n";
    gp << "plot ";
    bool first = true;
    for (const auto& s : summaries) {
      if (s.csv.empty()) continue;
      if (!first) gp << ", \\\n     ";
      gp << "'" << s.csv << "' using 2:4 with lines title '" << s.tag << "'";
      first = false;
    }
    gp << '\n';
    atomic_write(cfg.output + "/plot.gp", gp.str());
  }

  result.summaries = std::move(summaries);
  return result;
}

GridResult grid_search(const ExperimentConfig& cfg, const std::string& algo_tag,
                       const std::vector<double>& grid) {
  if (grid.empty()) throw ConfigError("grid: empty grid");
  const AlgoConfig* base = nullptr;
  for (const auto& a : cfg.algorithms)
    if (a.tag == algo_tag) base = &a;
  if (!base) throw ConfigError("grid: algorithm not in config: " + algo_tag);

  Graph g = generate(cfg.graph);
  TransitionMatrix chain = build_chain(g, cfg.chain_kind);
  if (cfg.chain_lazy) chain = lazify(chain);
  ConsensusProblem prob = build_problem(cfg);

  bool penalty_param = is_walkman(algo_tag) || algo_tag == "d-admm";

  GridResult result;
  for (double value : grid) {
    AlgoConfig algo = *base;
    if (penalty_param) algo.beta = value;
    else algo.alpha = value;
    GridPoint point;
    point.value = value;
    try {
      RunTrace trace = run_algorithm(prob, g, chain, algo, cfg,
                                     cfg.seeds_walk.front(), cfg.seed_latency);
      if (trace.status != RunStatus::Diverged) {
        if (trace.final_mse) point.final_error = trace.final_mse;
        else if (!trace.rows.empty() && trace.rows.back().nnpca_gap)
          point.final_error = trace.rows.back().nnpca_gap;
        else
          point.final_error = trace.final_objective;
      }
    } catch (const std::exception&) {
      point.final_error = std::nullopt;
    }
    result.points.push_back(point);
  }

  const GridPoint* best = nullptr;
  for (const auto& pt : result.points) {
    if (!pt.final_error) continue;
    if (!best || *pt.final_error < *best->final_error ||
        (*pt.final_error == *best->final_error &&
         (penalty_param ? pt.value > best->value : pt.value < best->value))) {
      best = &pt;
    }
  }
  if (!best) throw ConfigError("grid: all candidates diverged or failed");
  result.best = best->value;
  return result;
}

}  // namespace walkman::harness
