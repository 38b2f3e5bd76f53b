#include "walkman/metrics.hpp"

#include <cmath>

namespace walkman {

double round_time(int num_transmissions, Rng& rng) {
  if (num_transmissions < 1)
    throw ParameterError("round_time: need at least one transmission");
  std::exponential_distribution<double> exp1(1.0);
  double worst = 0.0;
  for (int t = 0; t < num_transmissions; ++t) worst = std::max(worst, exp1(rng));
  return worst;
}

double augmented_lagrangian(const Eigen::VectorXd& x, const Eigen::MatrixXd& Y,
                            const Eigen::MatrixXd& Z, double beta,
                            const ConsensusProblem& prob) {
  if (Y.rows() != prob.n || Y.cols() != prob.p || Z.rows() != Y.rows() ||
      Z.cols() != Y.cols())
    throw ParameterError("augmented_lagrangian: shape mismatch");
  double f_sum = 0.0;
  double inner = 0.0;
  double penalty = 0.0;
  for (int i = 0; i < prob.n; ++i) {
    Eigen::VectorXd yi = Y.row(i).transpose();
    Eigen::VectorXd diff = x - yi;
    f_sum += prob.local(i).value(yi);
    inner += Z.row(i).dot(diff);
    penalty += diff.squaredNorm();
  }
  return prob.reg->value(x) + (f_sum + inner + 0.5 * beta * penalty) / prob.n;
}

double lyapunov(const WalkmanState& state, const ConsensusProblem& prob,
                LyapunovKind which) {
  double L = augmented_lagrangian(state.x, state.Y, state.Z, state.beta, prob);
  if (which == LyapunovKind::L) return L;
  if (state.variant != Variant::Gradient)
    throw ConfigError("lyapunov: M is defined for the gradient variant only");
  double Lip = prob.lipschitz;
  return L + Lip * Lip / prob.n * state.last_disp_sq.sum();
}

namespace {

const LeastSquaresData& ls_data(const ConsensusProblem& prob) {
  if (prob.family != ProblemFamily::LeastSquares || !prob.ls)
    throw ConfigError("h_beta: least-squares problem required");
  return *prob.ls;
}

// T Y = (1/n) sum_i (I - A_i^T A_i / beta) y_i,  c = (1/(n beta)) sum_i A_i^T b_i
Eigen::VectorXd t_map(const Eigen::MatrixXd& Y, const LeastSquaresData& data,
                      double beta) {
  const int n = static_cast<int>(data.A.size());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(Y.cols());
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd yi = Y.row(i).transpose();
    acc += yi - data.A[i].transpose() * (data.A[i] * yi) / beta;
  }
  return acc / n;
}

Eigen::VectorXd c_vec(const LeastSquaresData& data, double beta) {
  const int n = static_cast<int>(data.A.size());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(data.A[0].cols());
  for (int i = 0; i < n; ++i) acc += data.A[i].transpose() * data.b[i];
  return acc / (n * beta);
}

}  // namespace

double h_beta(const Eigen::MatrixXd& Y, const ConsensusProblem& prob, double beta) {
  const auto& data = ls_data(prob);
  const int n = prob.n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd yi = Y.row(i).transpose();
    sum += 0.5 * beta * yi.squaredNorm() - 0.5 * (data.A[i] * yi).squaredNorm() +
           0.5 * data.b[i].squaredNorm();
  }
  Eigen::VectorXd affine = t_map(Y, data, beta) + c_vec(data, beta);
  return sum / n - 0.5 * beta * affine.squaredNorm();
}

Eigen::VectorXd h_beta_grad(const Eigen::MatrixXd& Y, const ConsensusProblem& prob,
                            double beta) {
  const auto& data = ls_data(prob);
  const int n = prob.n;
  const int p = prob.p;
  Eigen::VectorXd affine = t_map(Y, data, beta) + c_vec(data, beta);
  Eigen::VectorXd grad(n * p);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd yi = Y.row(i).transpose();
    Eigen::VectorXd residual = yi - affine;
    Eigen::VectorXd di2 = residual - data.A[i].transpose() * (data.A[i] * residual) / beta;
    grad.segment(i * p, p) = beta / n * di2;
  }
  return grad;
}

Eigen::MatrixXd h_beta_hessian(const ConsensusProblem& prob, double beta) {
  const auto& data = ls_data(prob);
  const int n = prob.n;
  const int p = prob.p;
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(p, p);
  std::vector<Eigen::MatrixXd> d2(n);
  for (int i = 0; i < n; ++i)
    d2[i] = eye - data.A[i].transpose() * data.A[i] / beta;
  Eigen::MatrixXd H(n * p, n * p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Eigen::MatrixXd block = -beta / (double(n) * n) * (d2[i] * d2[j]);
      if (i == j) block += beta / n * d2[i];
      H.block(i * p, j * p, p, p) = block;
    }
  }
  return H;
}

double subgrad_norm_sq(const WalkmanState& state, const StepInfo& info,
                       const ConsensusProblem& prob) {
  const int n = prob.n;
  const double beta = state.beta;
  // x-component from the visited agent's displacements
  Eigen::VectorXd w = (-beta * info.dy + info.dz) / n;
  double total = w.squaredNorm();
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd yj = state.Y.row(j).transpose();
    Eigen::VectorXd zj = state.Z.row(j).transpose();
    Eigen::VectorXd gy = (prob.local(j).grad(yj) - zj + beta * (yj - state.x)) / n;
    Eigen::VectorXd gz = (state.x - yj) / n;
    total += gy.squaredNorm() + gz.squaredNorm();
  }
  return total;
}

double distance_sq_to_normal_cone(const Eigen::VectorXd& v, const Eigen::VectorXd& x) {
  constexpr double active_tol = 1e-12;
  constexpr double ball_tol = 1e-9;
  double dist = 0.0;
  bool ball_active = x.norm() >= 1.0 - ball_tol;
  if (!ball_active) {
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      if (x(j) <= active_tol) {
        double excess = std::max(v(j), 0.0);  // cone allows any v_j <= 0
        dist += excess * excess;
      } else {
        dist += v(j) * v(j);
      }
    }
    return dist;
  }
  // Ball face active: cone adds nonnegative multiples of x on the support
  // coordinates; minimize over that radial multiplier.
  double num = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (x(j) > active_tol) {
      num += v(j) * x(j);
      den += x(j) * x(j);
    }
  }
  double lam = den > 0.0 ? std::max(0.0, num / den) : 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (x(j) <= active_tol) {
      double excess = std::max(v(j), 0.0);
      dist += excess * excess;
    } else {
      double r = v(j) - lam * x(j);
      dist += r * r;
    }
  }
  return dist;
}

double nnpca_optimality_gap(const Eigen::VectorXd& x, const Eigen::MatrixXd& Y,
                            const ConsensusProblem& prob) {
  double gap = nnpca_optimality_gap(x, prob);
  for (int i = 0; i < prob.n; ++i)
    gap += (Y.row(i).transpose() - x).squaredNorm();
  return gap;
}

double nnpca_optimality_gap(const Eigen::VectorXd& x, const ConsensusProblem& prob) {
  if (prob.family != ProblemFamily::NnPca)
    throw ConfigError("nnpca_optimality_gap: wrong problem family");
  Eigen::VectorXd neg_grad = -prob.mean_grad(x);
  return distance_sq_to_normal_cone(neg_grad, x);
}

}  // namespace walkman
