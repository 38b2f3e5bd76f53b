#include "walkman/markov.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace walkman {

namespace {

// Two-coloring check; a connected graph is bipartite iff BFS finds no
// odd cycle.
bool is_bipartite(const Graph& g) {
  auto adj = g.adjacency();
  std::vector<int> color(g.n, -1);
  std::vector<int> stack;
  for (int s = 0; s < g.n; ++s) {
    if (color[s] != -1) continue;
    color[s] = 0;
    stack.push_back(s);
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[u]) {
        if (color[v] == -1) {
          color[v] = 1 - color[u];
          stack.push_back(v);
        } else if (color[v] == color[u]) {
          return false;
        }
      }
    }
  }
  return true;
}

// Orthonormal basis of the subspace orthogonal to the all-ones vector,
// taken from the trailing columns of a Householder QR of 1.
Eigen::MatrixXd ones_complement_basis(int n) {
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, 1);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
  Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(n - 1);
}

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& a, long e) {
  int n = static_cast<int>(a.rows());
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  if (e <= 64) {
    for (long i = 0; i < e; ++i) result = result * a;
    return result;
  }
  // repeated squaring for large exponents
  Eigen::MatrixXd base = a;
  long rem = e;
  while (rem > 0) {
    if (rem & 1) result = result * base;
    base = base * base;
    rem >>= 1;
  }
  return result;
}

}  // namespace

bool TransitionMatrix::is_symmetric(double tol) const {
  return (P - P.transpose()).cwiseAbs().maxCoeff() <= tol;
}

TransitionMatrix build_chain(const Graph& g, ChainKind kind) {
  if (!is_connected(g)) throw TopologyError("chain: graph must be connected");
  auto deg = g.degrees();
  TransitionMatrix tm;
  tm.kind = kind;
  tm.P = Eigen::MatrixXd::Zero(g.n, g.n);
  if (g.n == 1) {
    tm.P(0, 0) = 1.0;
    return tm;
  }
  if (kind == ChainKind::Simple) {
    for (const auto& [i, j] : g.edges) {
      tm.P(i, j) = 1.0 / deg[i];
      tm.P(j, i) = 1.0 / deg[j];
    }
    tm.periodic_warning = is_bipartite(g);
  } else {
    int dmax = *std::max_element(deg.begin(), deg.end());
    for (const auto& [i, j] : g.edges) {
      tm.P(i, j) = 1.0 / dmax;
      tm.P(j, i) = 1.0 / dmax;
    }
    for (int i = 0; i < g.n; ++i)
      tm.P(i, i) = 1.0 - static_cast<double>(deg[i]) / dmax;
    // Regular bipartite graphs keep a zero diagonal and stay periodic.
    bool has_self_loop = false;
    for (int i = 0; i < g.n; ++i)
      if (tm.P(i, i) > 0.0) has_self_loop = true;
    tm.periodic_warning = !has_self_loop && is_bipartite(g);
  }
  return tm;
}

TransitionMatrix lazify(const TransitionMatrix& tm) {
  TransitionMatrix lazy = tm;
  int n = tm.n();
  lazy.P = 0.5 * (tm.P + Eigen::MatrixXd::Identity(n, n));
  lazy.periodic_warning = false;
  return lazy;
}

Eigen::VectorXd stationary(const TransitionMatrix& tm) {
  int n = tm.n();
  if (n == 1) return Eigen::VectorXd::Ones(1);
  // Solve [P^T - I; 1^T] pi = [0; 1] in the least-squares sense; the
  // solution is exact for an irreducible chain.
  Eigen::MatrixXd sys(n + 1, n);
  sys.topRows(n) = tm.P.transpose() - Eigen::MatrixXd::Identity(n, n);
  sys.row(n).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  Eigen::VectorXd pi = sys.colPivHouseholderQr().solve(rhs);
  double residual = (tm.P.transpose() * pi - pi).norm();
  if (!(residual <= 1e-10) || !(pi.minCoeff() > 0.0))
    throw NumericalError("stationary: solve failed or chain not irreducible");
  pi /= pi.sum();
  return pi;
}

SpectralInfo spectral(const TransitionMatrix& tm) {
  SpectralInfo info;
  int n = tm.n();
  if (n == 1) {
    info.sigma = 0.0;
    info.lambda2 = 0.0;
    info.lambda2_second = 0.0;
    return info;
  }
  Eigen::MatrixXd q = ones_complement_basis(n);
  // sigma = largest singular value of f -> f^T P over {f : f^T 1 = 0}
  Eigen::MatrixXd restricted = q.transpose() * tm.P;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(restricted);
  info.sigma = svd.singularValues()(0);
  if (tm.is_symmetric(1e-12)) {
    // 1 is simple for a connected chain, so Q^T P Q carries exactly the
    // remaining eigenvalues.
    Eigen::MatrixXd reduced = q.transpose() * tm.P * q;
    reduced = 0.5 * (reduced + reduced.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reduced);
    const auto& ev = es.eigenvalues();
    info.lambda2 = std::max(std::abs(ev(0)), std::abs(ev(n - 2)));
    info.lambda2_second = ev(n - 2);
  }
  return info;
}

int mixing_time(const TransitionMatrix& tm, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw ParameterError("mixing_time: delta must be in (0,1)");
  double sigma = spectral(tm).sigma;
  if (sigma >= 1.0 - 1e-9)
    throw ChainError("mixing_time: sigma(P) >= 1, chain is periodic or reducible");
  Eigen::VectorXd pi = stationary(tm);
  double pi_star = pi.minCoeff();
  double value = std::log(std::sqrt(2.0) / (delta * pi_star)) / (1.0 - sigma);
  return static_cast<int>(std::ceil(value));
}

bool verify_mixing(const TransitionMatrix& tm, double delta, int tau) {
  if (tau < 0) throw ParameterError("verify_mixing: tau must be >= 0");
  Eigen::VectorXd pi = stationary(tm);
  double bound = delta * pi.minCoeff();
  Eigen::MatrixXd pk = matrix_power(tm.P, tau);
  for (int i = 0; i < tm.n(); ++i) {
    if ((pk.row(i).transpose() - pi).norm() > bound) return false;
  }
  return true;
}

int walk_step(const TransitionMatrix& tm, int state, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  double acc = 0.0;
  int n = tm.n();
  for (int j = 0; j < n; ++j) {
    acc += tm.P(state, j);
    if (u <= acc) return j;
  }
  return n - 1;  // guard against rounding in the row sum
}

WalkResult sample_walk(const TransitionMatrix& tm, int start, long steps, Rng& rng) {
  int n = tm.n();
  if (start < 0 || start >= n) throw ParameterError("sample_walk: start out of range");
  WalkResult result;
  result.nodes.reserve(steps + 1);
  result.nodes.push_back(start);
  std::vector<char> visited(n, 0);
  visited[start] = 1;
  int distinct = 1;
  if (distinct == n) result.cover_time = 0;
  int state = start;
  for (long k = 0; k < steps; ++k) {
    state = walk_step(tm, state, rng);
    result.nodes.push_back(state);
    if (!visited[state]) {
      visited[state] = 1;
      ++distinct;
      if (distinct == n) result.cover_time = k + 1;
    }
  }
  return result;
}

ChainStats chain_stats(const TransitionMatrix& tm, double delta) {
  ChainStats stats;
  stats.pi = stationary(tm);
  stats.pi_star = stats.pi.minCoeff();
  SpectralInfo info = spectral(tm);
  stats.sigma = info.sigma;
  stats.lambda2 = info.lambda2;
  stats.lambda2_second = info.lambda2_second;
  stats.delta = delta;
  stats.tau = mixing_time(tm, delta);
  return stats;
}

}  // namespace walkman
