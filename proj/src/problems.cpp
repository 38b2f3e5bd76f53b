#include "walkman/problems.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

namespace walkman {

double ConsensusProblem::objective(const Eigen::VectorXd& x) const {
  double total = reg ? reg->value(x) : 0.0;
  double sum = 0.0;
  for (const auto& f : locals) sum += f->value(x);
  return total + sum / n;
}

Eigen::VectorXd ConsensusProblem::mean_grad(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(p);
  for (const auto& f : locals) g += f->grad(x);
  return g / n;
}

Eigen::VectorXd LocalObjective::stationary_point(double beta, int dim) const {
  // Backtracking gradient descent on phi(y) = (beta/2)||y||^2 - f(y),
  // strongly convex whenever beta exceeds the gradient-Lipschitz constant.
  Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
  for (int iter = 0; iter < 20000; ++iter) {
    Eigen::VectorXd g = beta * y - grad(y);
    double gnorm = g.norm();
    if (gnorm <= 1e-12 * std::max(1.0, beta * y.norm())) break;
    double phi0 = 0.5 * beta * y.squaredNorm() - value(y);
    double t = 1.0 / beta;
    while (t > 1e-14) {
      Eigen::VectorXd cand = y - t * g;
      double phi = 0.5 * beta * cand.squaredNorm() - value(cand);
      if (phi <= phi0 - 0.5 * t * gnorm * gnorm) break;
      t *= 0.5;
    }
    y -= t * g;
  }
  return y;
}

// ---------------------------------------------------------------------------
// Regularizers

L1Regularizer::L1Regularizer(double lambda) : lambda_(lambda) {
  if (lambda < 0.0) throw ParameterError("l1: lambda must be >= 0");
}

double L1Regularizer::value(const Eigen::VectorXd& x) const {
  return lambda_ * x.lpNorm<1>();
}

Eigen::VectorXd L1Regularizer::prox(const Eigen::VectorXd& v, double beta) const {
  double t = lambda_ / beta;  // soft threshold
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double a = std::abs(v(i)) - t;
    out(i) = a > 0.0 ? (v(i) > 0.0 ? a : -a) : 0.0;
  }
  return out;
}

double NonnegBallIndicator::value(const Eigen::VectorXd& x) const {
  constexpr double tol = 1e-9;
  if (x.minCoeff() < -tol || x.norm() > 1.0 + tol)
    return std::numeric_limits<double>::infinity();
  return 0.0;
}

Eigen::VectorXd NonnegBallIndicator::project(const Eigen::VectorXd& v) {
  Eigen::VectorXd out = v.cwiseMax(0.0);
  double norm = out.norm();
  if (norm > 1.0) out /= norm;
  return out;
}

Eigen::VectorXd NonnegBallIndicator::prox(const Eigen::VectorXd& v, double) const {
  return project(v);
}

// ---------------------------------------------------------------------------
// Local objectives

QuadraticObjective::QuadraticObjective(Eigen::MatrixXd A, Eigen::VectorXd b)
    : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() != b_.size()) throw ParameterError("quadratic: A rows != b size");
  gram_ = A_.transpose() * A_;
  atb_ = A_.transpose() * b_;
}

double QuadraticObjective::value(const Eigen::VectorXd& y) const {
  return 0.5 * (A_ * y - b_).squaredNorm();
}

Eigen::VectorXd QuadraticObjective::grad(const Eigen::VectorXd& y) const {
  return gram_ * y - atb_;
}

Eigen::VectorXd QuadraticObjective::prox(const Eigen::VectorXd& v, double beta) const {
  // (A^T A + beta I) y = A^T b + beta v
  Eigen::MatrixXd m = gram_;
  m.diagonal().array() += beta;
  return Eigen::LLT<Eigen::MatrixXd>(m).solve(atb_ + beta * v);
}

Eigen::VectorXd QuadraticObjective::stationary_point(double beta, int) const {
  // (A^T A - beta I) y = A^T b, negative definite for beta > sigma_max
  Eigen::MatrixXd m = -gram_;
  m.diagonal().array() += beta;
  return Eigen::LLT<Eigen::MatrixXd>(m).solve(-atb_);
}

LogisticObjective::LogisticObjective(Eigen::MatrixXd features, Eigen::VectorXd labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.rows() != labels_.size())
    throw ParameterError("logistic: feature rows != label count");
}

namespace {
inline double log1pexp(double t) {
  // numerically stable log(1 + e^t)
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}
}  // namespace

double LogisticObjective::value(const Eigen::VectorXd& y) const {
  Eigen::VectorXd margins = (features_ * y).cwiseProduct(labels_);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < margins.size(); ++j) sum += log1pexp(-margins(j));
  return sum / features_.rows();
}

Eigen::VectorXd LogisticObjective::grad(const Eigen::VectorXd& y) const {
  Eigen::VectorXd margins = (features_ * y).cwiseProduct(labels_);
  Eigen::VectorXd weights(margins.size());
  for (Eigen::Index j = 0; j < margins.size(); ++j)
    weights(j) = -labels_(j) / (1.0 + std::exp(margins(j)));
  return features_.transpose() * weights / features_.rows();
}

Eigen::VectorXd LogisticObjective::prox(const Eigen::VectorXd& v, double beta) const {
  // Damped Newton on the strongly convex subproblem
  //   min_y f(y) + (beta/2) ||y - v||^2,
  // stopping at gradient norm <= 1e-10 or 50 iterations.
  const int b = static_cast<int>(features_.rows());
  const int p = static_cast<int>(features_.cols());
  Eigen::VectorXd y = v;
  for (int iter = 0; iter < 50; ++iter) {
    Eigen::VectorXd g = grad(y) + beta * (y - v);
    if (g.norm() <= 1e-10) break;
    Eigen::VectorXd margins = (features_ * y).cwiseProduct(labels_);
    Eigen::MatrixXd h = beta * Eigen::MatrixXd::Identity(p, p);
    for (int j = 0; j < b; ++j) {
      double s = 1.0 / (1.0 + std::exp(margins(j)));
      double w = s * (1.0 - s) / b;
      h.noalias() += w * features_.row(j).transpose() * features_.row(j);
    }
    Eigen::VectorXd step = Eigen::LLT<Eigen::MatrixXd>(h).solve(g);
    double phi0 = value(y) + 0.5 * beta * (y - v).squaredNorm();
    double t = 1.0;
    while (t > 1e-8) {
      Eigen::VectorXd cand = y - t * step;
      double phi = value(cand) + 0.5 * beta * (cand - v).squaredNorm();
      if (phi <= phi0 - 1e-4 * t * g.dot(step)) break;
      t *= 0.5;
    }
    y -= t * step;
  }
  return y;
}

Eigen::VectorXd LogisticObjective::stationary_point(double beta, int dim) const {
  // Damped Newton on phi(y) = (beta/2)||y||^2 - f(y).
  const int b = static_cast<int>(features_.rows());
  Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
  for (int iter = 0; iter < 100; ++iter) {
    Eigen::VectorXd g = beta * y - grad(y);
    if (g.norm() <= 1e-13 * std::max(1.0, beta * y.norm())) break;
    Eigen::VectorXd margins = (features_ * y).cwiseProduct(labels_);
    Eigen::MatrixXd h = beta * Eigen::MatrixXd::Identity(dim, dim);
    for (int j = 0; j < b; ++j) {
      double s = 1.0 / (1.0 + std::exp(margins(j)));
      double w = s * (1.0 - s) / b;
      h.noalias() -= w * features_.row(j).transpose() * features_.row(j);
    }
    Eigen::VectorXd step = Eigen::LDLT<Eigen::MatrixXd>(h).solve(g);
    double phi0 = 0.5 * beta * y.squaredNorm() - value(y);
    double t = 1.0;
    while (t > 1e-10) {
      Eigen::VectorXd cand = y - t * step;
      double phi = 0.5 * beta * cand.squaredNorm() - value(cand);
      if (phi <= phi0 - 1e-4 * t * g.dot(step)) break;
      t *= 0.5;
    }
    y -= t * step;
  }
  return y;
}

NegQuadraticFormObjective::NegQuadraticFormObjective(Eigen::MatrixXd S)
    : S_(std::move(S)) {
  if (S_.rows() != S_.cols()) throw ParameterError("nnpca: S must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S_);
  lambda_max_ = es.eigenvalues().maxCoeff();
}

double NegQuadraticFormObjective::value(const Eigen::VectorXd& y) const {
  return -y.dot(S_ * y);
}

Eigen::VectorXd NegQuadraticFormObjective::grad(const Eigen::VectorXd& y) const {
  return -2.0 * (S_ * y);
}

Eigen::VectorXd NegQuadraticFormObjective::prox(const Eigen::VectorXd& v,
                                                double beta) const {
  if (beta <= 2.0 * lambda_max_ + 1e-12)
    throw ConfigError("nnpca prox: requires beta > 2 lambda_max(S); use the gradient variant");
  Eigen::MatrixXd m = -2.0 * S_;
  m.diagonal().array() += beta;
  return Eigen::LLT<Eigen::MatrixXd>(m).solve(beta * v);
}

Eigen::VectorXd NegQuadraticFormObjective::stationary_point(double beta, int dim) const {
  // (beta I + 2S) y = 0 has only the trivial solution for S PSD.
  (void)beta;
  return Eigen::VectorXd::Zero(dim);
}

// ---------------------------------------------------------------------------
// Generators

ConsensusProblem make_least_squares(std::vector<Eigen::MatrixXd> A,
                                    std::vector<Eigen::VectorXd> b) {
  if (A.empty() || A.size() != b.size())
    throw ParameterError("least squares: need matching nonempty A, b");
  const int n = static_cast<int>(A.size());
  const int p = static_cast<int>(A[0].cols());

  ConsensusProblem prob;
  prob.n = n;
  prob.p = p;
  prob.family = ProblemFamily::LeastSquares;
  prob.reg = std::make_shared<ZeroRegularizer>();
  prob.gamma = 0.0;

  auto data = std::make_shared<LeastSquaresData>();
  Eigen::MatrixXd gram_sum = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd atb_sum = Eigen::VectorXd::Zero(p);
  for (int i = 0; i < n; ++i) {
    if (A[i].cols() != p) throw ParameterError("least squares: inconsistent p");
    auto local = std::make_shared<QuadraticObjective>(A[i], b[i]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(local->gram());
    data->sigma_max_star = std::max(data->sigma_max_star, es.eigenvalues().maxCoeff());
    gram_sum += local->gram();
    atb_sum += local->Atb();
    prob.locals.push_back(local);
    data->A.push_back(A[i]);
    data->b.push_back(b[i]);
  }
  prob.lipschitz = data->sigma_max_star;
  prob.ls = data;

  Eigen::LDLT<Eigen::MatrixXd> solver(gram_sum);
  if (solver.info() != Eigen::Success || !solver.isPositive() ||
      solver.vectorD().minCoeff() <= 1e-12 * solver.vectorD().maxCoeff()) {
    long total_rows = 0;
    for (const auto& Ai : A) total_rows += Ai.rows();
    std::string hint = total_rows < p ? " (fewer total rows than unknowns)" : "";
    throw DataError("least squares: sum of A_i^T A_i is singular" + hint);
  }
  prob.optimum = solver.solve(atb_sum);
  return prob;
}

ConsensusProblem gen_least_squares(int n, int rows, int p, double noise, Rng& rng) {
  if (n <= 0 || rows <= 0 || p <= 0)
    throw ParameterError("least squares: n, rows, p must be positive");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd x0(p);
  for (int k = 0; k < p; ++k) x0(k) = gauss(rng);

  std::vector<Eigen::MatrixXd> A(n);
  std::vector<Eigen::VectorXd> b(n);
  double noise_sd = std::sqrt(noise);
  for (int i = 0; i < n; ++i) {
    A[i].resize(rows, p);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < p; ++c) A[i](r, c) = gauss(rng);
    Eigen::VectorXd v(rows);
    for (int r = 0; r < rows; ++r) v(r) = noise_sd * gauss(rng);
    b[i] = A[i] * x0 + v;
  }
  return make_least_squares(std::move(A), std::move(b));
}

ConsensusProblem gen_logistic(int n, int b_samples, int p, double lambda, Rng& rng) {
  if (n <= 0 || b_samples <= 0 || p <= 0)
    throw ParameterError("logistic: n, b, p must be positive");
  if (lambda < 0.0) throw ParameterError("logistic: lambda must be >= 0");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Eigen::VectorXd x0(p);
  for (int k = 0; k < p; ++k) x0(k) = gauss(rng);

  ConsensusProblem prob;
  prob.n = n;
  prob.p = p;
  prob.family = ProblemFamily::Logistic;
  prob.reg = std::make_shared<L1Regularizer>(lambda);
  prob.gamma = 0.0;

  double max_curvature = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd features(b_samples, p);
    Eigen::VectorXd labels(b_samples);
    for (int j = 0; j < b_samples; ++j) {
      for (int k = 0; k < p; ++k) features(j, k) = gauss(rng);
      double sigmoid = 1.0 / (1.0 + std::exp(-features.row(j).dot(x0)));
      labels(j) = unif(rng) <= sigmoid ? 1.0 : -1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(features.transpose() * features);
    max_curvature = std::max(max_curvature, es.eigenvalues().maxCoeff() /
                                                (4.0 * b_samples));
    prob.locals.push_back(std::make_shared<LogisticObjective>(features, labels));
  }
  prob.lipschitz = max_curvature;
  return prob;
}

ConsensusProblem gen_nnpca(int n, int b_samples, int p, const NnPcaSource& source,
                           Rng& rng) {
  if (n <= 0 || b_samples <= 0) throw ParameterError("nnpca: n, b must be positive");

  std::vector<Eigen::MatrixXd> per_agent_samples(n);
  if (!source.idx_images.empty()) {
    Eigen::MatrixXd images = load_idx(source.idx_images);
    Eigen::MatrixXd labels = load_idx(source.idx_labels);
    if (images.rows() != labels.rows())
      throw DataError("nnpca: image/label counts differ");
    p = static_cast<int>(images.cols());
    // each agent keeps samples sharing one label (agent i <- label i mod 10)
    std::vector<int> filled(n, 0);
    for (auto& m : per_agent_samples) m.resize(b_samples, p);
    for (Eigen::Index row = 0; row < images.rows(); ++row) {
      int label = static_cast<int>(labels(row, 0));
      for (int i = label % 10; i < n; i += 10) {
        if (filled[i] < b_samples) {
          per_agent_samples[i].row(filled[i]++) = images.row(row);
          break;
        }
      }
    }
    for (int i = 0; i < n; ++i)
      if (filled[i] < b_samples)
        throw DataError("nnpca: not enough samples for agent " + std::to_string(i));
  } else {
    if (p <= 0) throw ParameterError("nnpca: p must be positive");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd spike_dir(p);
    for (int k = 0; k < p; ++k) spike_dir(k) = unif(rng);
    spike_dir /= spike_dir.norm();
    double spike_sd = std::sqrt(source.spike);
    for (int i = 0; i < n; ++i) {
      per_agent_samples[i].resize(b_samples, p);
      for (int j = 0; j < b_samples; ++j) {
        double along = spike_sd * gauss(rng);
        for (int k = 0; k < p; ++k)
          per_agent_samples[i](j, k) = along * spike_dir(k) + gauss(rng);
      }
    }
  }

  ConsensusProblem prob;
  prob.n = n;
  prob.p = p;
  prob.family = ProblemFamily::NnPca;
  prob.reg = std::make_shared<NonnegBallIndicator>();
  prob.gamma = 0.0;

  auto data = std::make_shared<NnPcaData>();
  double lmax_star = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd S =
        per_agent_samples[i].transpose() * per_agent_samples[i] / b_samples;
    auto local = std::make_shared<NegQuadraticFormObjective>(S);
    lmax_star = std::max(lmax_star, local->lambda_max());
    data->S.push_back(S);
    data->lambda_max.push_back(local->lambda_max());
    prob.locals.push_back(local);
  }
  prob.lipschitz = 2.0 * lmax_star;
  prob.nnpca = data;
  return prob;
}

// ---------------------------------------------------------------------------
// IDX ingestion

namespace {
std::uint32_t read_u32_be(std::istream& in) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4))
    throw ParseError("idx: truncated header");
  return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
         (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}
}  // namespace

Eigen::MatrixXd load_idx(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("idx: cannot open " + path);
  std::uint32_t magic = read_u32_be(in);
  if (magic == 0x00000801u) {
    std::uint32_t count = read_u32_be(in);
    std::vector<unsigned char> bytes(count);
    if (!in.read(reinterpret_cast<char*>(bytes.data()), count))
      throw ParseError("idx: truncated label payload");
    Eigen::MatrixXd labels(count, 1);
    for (std::uint32_t i = 0; i < count; ++i) labels(i, 0) = bytes[i];
    return labels;
  }
  if (magic == 0x00000803u) {
    std::uint32_t count = read_u32_be(in);
    std::uint32_t rows = read_u32_be(in);
    std::uint32_t cols = read_u32_be(in);
    std::uint64_t pixels = std::uint64_t(rows) * cols;
    if (pixels == 0) throw ParseError("idx: zero image dimensions");
    Eigen::MatrixXd images(count, pixels);
    std::vector<unsigned char> buf(pixels);
    for (std::uint32_t i = 0; i < count; ++i) {
      if (!in.read(reinterpret_cast<char*>(buf.data()), pixels))
        throw ParseError("idx: truncated image payload");
      for (std::uint64_t k = 0; k < pixels; ++k)
        images(i, k) = buf[k] / 255.0;
    }
    return images;
  }
  throw ParseError("idx: bad magic");
}

}  // namespace walkman
