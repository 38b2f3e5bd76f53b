#ifndef WALKMAN_PROBLEMS_HPP_
#define WALKMAN_PROBLEMS_HPP_

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "walkman/common.hpp"

namespace walkman {

//! One agent's private objective f_i.
class LocalObjective {
 public:
  virtual ~LocalObjective() = default;
  virtual double value(const Eigen::VectorXd& y) const = 0;
  virtual Eigen::VectorXd grad(const Eigen::VectorXd& y) const = 0;
  //! argmin_y f(y) + (beta/2) ||y - v||^2
  virtual Eigen::VectorXd prox(const Eigen::VectorXd& v, double beta) const = 0;
  //! Solve grad f(y) = beta y, the stationary point of f - (beta/2)||.||^2.
  //! Unique for beta above the gradient-Lipschitz constant. The base
  //! implementation descends (beta/2)||y||^2 - f(y) from zero; concrete
  //! objectives override with direct solves.
  virtual Eigen::VectorXd stationary_point(double beta, int dim) const;
};

//! The shared regularizer r.
class Regularizer {
 public:
  virtual ~Regularizer() = default;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  //! argmin_x r(x) + (beta/2) ||x - v||^2
  virtual Eigen::VectorXd prox(const Eigen::VectorXd& v, double beta) const = 0;
  //! Semiconvexity modulus: r + (gamma/2)||.||^2 is convex.
  virtual double semiconvexity() const { return 0.0; }
};

class ZeroRegularizer final : public Regularizer {
 public:
  double value(const Eigen::VectorXd&) const override { return 0.0; }
  Eigen::VectorXd prox(const Eigen::VectorXd& v, double) const override { return v; }
};

//! lambda * ||x||_1 with soft-threshold prox.
class L1Regularizer final : public Regularizer {
 public:
  explicit L1Regularizer(double lambda);
  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd prox(const Eigen::VectorXd& v, double beta) const override;
  double lambda() const { return lambda_; }

 private:
  double lambda_;
};

//! Indicator of C = {x : x >= 0, ||x|| <= 1}; prox = projection
//! (clip negatives, then scale to the unit ball if needed).
class NonnegBallIndicator final : public Regularizer {
 public:
  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd prox(const Eigen::VectorXd& v, double beta) const override;
  static Eigen::VectorXd project(const Eigen::VectorXd& v);
};

enum class ProblemFamily { LeastSquares, Logistic, NnPca, Custom };

struct LeastSquaresData {
  std::vector<Eigen::MatrixXd> A;  // per-agent design matrices
  std::vector<Eigen::VectorXd> b;
  double sigma_max_star = 0.0;  // max_i lambda_max(A_i^T A_i)
};

struct NnPcaData {
  std::vector<Eigen::MatrixXd> S;  // per-agent sample second moments
  std::vector<double> lambda_max;  // lambda_max(S_i)
};

struct ConsensusProblem {
  int n = 0;  // agents
  int p = 0;  // variable dimension
  ProblemFamily family = ProblemFamily::Custom;
  std::vector<std::shared_ptr<const LocalObjective>> locals;
  std::shared_ptr<const Regularizer> reg;
  double lipschitz = 0.0;  // common gradient-Lipschitz constant L
  double gamma = 0.0;      // semiconvexity modulus of r
  std::optional<Eigen::VectorXd> optimum;  // closed-form x* when available
  std::shared_ptr<const LeastSquaresData> ls;
  std::shared_ptr<const NnPcaData> nnpca;

  const LocalObjective& local(int i) const { return *locals[i]; }
  //! r(x) + (1/n) sum_i f_i(x)
  double objective(const Eigen::VectorXd& x) const;
  //! (1/n) sum_i grad f_i(x)
  Eigen::VectorXd mean_grad(const Eigen::VectorXd& x) const;
};

// Concrete local objectives, exposed so tests and custom problems can
// compose them directly.

//! f(y) = 0.5 ||A y - b||^2
class QuadraticObjective final : public LocalObjective {
 public:
  QuadraticObjective(Eigen::MatrixXd A, Eigen::VectorXd b);
  double value(const Eigen::VectorXd& y) const override;
  Eigen::VectorXd grad(const Eigen::VectorXd& y) const override;
  Eigen::VectorXd prox(const Eigen::VectorXd& v, double beta) const override;
  Eigen::VectorXd stationary_point(double beta, int dim) const override;
  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::VectorXd& Atb() const { return atb_; }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  Eigen::MatrixXd gram_;  // A^T A
  Eigen::VectorXd atb_;   // A^T b
};

//! f(y) = (1/b) sum_j log(1 + exp(-y_j * v_j^T y)); prox via damped Newton.
class LogisticObjective final : public LocalObjective {
 public:
  LogisticObjective(Eigen::MatrixXd features, Eigen::VectorXd labels);
  double value(const Eigen::VectorXd& y) const override;
  Eigen::VectorXd grad(const Eigen::VectorXd& y) const override;
  Eigen::VectorXd prox(const Eigen::VectorXd& v, double beta) const override;
  Eigen::VectorXd stationary_point(double beta, int dim) const override;
  const Eigen::MatrixXd& features() const { return features_; }
  const Eigen::VectorXd& labels() const { return labels_; }

 private:
  Eigen::MatrixXd features_;  // b x p, row j = v_j^T
  Eigen::VectorXd labels_;    // entries in {-1, +1}
};

//! f(y) = -y^T S y with S PSD; prox solves (beta I - 2S) y = beta v and is
//! defined only for beta > 2 lambda_max(S).
class NegQuadraticFormObjective final : public LocalObjective {
 public:
  explicit NegQuadraticFormObjective(Eigen::MatrixXd S);
  double value(const Eigen::VectorXd& y) const override;
  Eigen::VectorXd grad(const Eigen::VectorXd& y) const override;
  Eigen::VectorXd prox(const Eigen::VectorXd& v, double beta) const override;
  Eigen::VectorXd stationary_point(double beta, int dim) const override;
  const Eigen::MatrixXd& S() const { return S_; }
  double lambda_max() const { return lambda_max_; }

 private:
  Eigen::MatrixXd S_;
  double lambda_max_;
};

//! Least squares per agent: A_i (rows x p) standard Gaussian,
//! b_i = A_i x0 + v_i with v_i ~ N(0, noise*I).
ConsensusProblem gen_least_squares(int n, int rows, int p, double noise, Rng& rng);

//! Build the least-squares problem from explicit data (used by tests).
ConsensusProblem make_least_squares(std::vector<Eigen::MatrixXd> A,
                                    std::vector<Eigen::VectorXd> b);

//! Sparse logistic regression: r = lambda ||x||_1, per-agent average
//! logistic loss over b_samples synthetic samples.
ConsensusProblem gen_logistic(int n, int b_samples, int p, double lambda, Rng& rng);

struct NnPcaSource {
  // Synthetic when idx paths are empty: Gaussian samples with a planted
  // nonnegative spike direction so the principal component is feasible.
  std::string idx_images;
  std::string idx_labels;
  double spike = 5.0;
};

ConsensusProblem gen_nnpca(int n, int b_samples, int p, const NnPcaSource& source,
                           Rng& rng);

//! Parse an IDX file. Images (magic 0x00000803) are returned one sample per
//! row, pixel values scaled to [0,1]. Labels (magic 0x00000801) come back as
//! a single column.
Eigen::MatrixXd load_idx(const std::string& path);

}  // namespace walkman

#endif  // WALKMAN_PROBLEMS_HPP_
