#include "walkman/theory.hpp"

#include <cmath>

namespace walkman::theory {

void ComplexityInputs::validate() const {
  if (n < 2) throw ParameterError("complexity: n must be >= 2");
  if (m < 1) throw ParameterError("complexity: m must be >= 1");
  if (!(lambda2 >= 0.0 && lambda2 < 1.0))
    throw ParameterError("complexity: lambda2 must be in [0,1)");
  if (!(pi_star > 0.0 && pi_star <= 1.0 / n + 1e-12))
    throw ParameterError("complexity: pi_star must be in (0, 1/n]");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ParameterError("complexity: epsilon must be in (0,1)");
  if (!(delta > 0.0 && delta < 1.0))
    throw ParameterError("complexity: delta must be in (0,1)");
}

WalkmanComm walkman_comm(const ComplexityInputs& in) {
  in.validate();
  const double sigma = in.lambda2;
  const double gap = 1.0 - sigma;
  WalkmanComm out;
  if (std::abs(in.delta - 0.5) < 1e-12) {
    // epoch number:   ln(n/eps) / ln(1 + (1-sigma) pi* / (2 ln(2/pi*)))
    // comm per epoch: ln(2/pi*) / (1-sigma)
    out.per_epoch = std::log(2.0 / in.pi_star) / gap;
    out.epochs = std::log(in.n / in.epsilon) /
                 std::log1p(gap * in.pi_star / (2.0 * std::log(2.0 / in.pi_star)));
  } else {
    double tau = std::log(std::sqrt(2.0) / (in.delta * in.pi_star)) / gap;
    out.per_epoch = tau;
    out.epochs = std::log(in.n / in.epsilon) /
                 std::log1p((1.0 - in.delta) * in.pi_star / tau);
  }
  out.exact = out.epochs * out.per_epoch;
  double ln_n = std::log(static_cast<double>(in.n));
  out.simplified = std::log(1.0 / in.epsilon) * in.n * ln_n * ln_n * ln_n / (gap * gap);
  return out;
}

std::string to_string(BaselineAlgo algo) {
  switch (algo) {
    case BaselineAlgo::DAdmm: return "d-admm";
    case BaselineAlgo::Extra: return "extra";
    case BaselineAlgo::ExactDiffusion: return "exact-diffusion";
    case BaselineAlgo::Esdacd: return "esdacd";
    case BaselineAlgo::RwAdmm: return "rw-admm";
  }
  return "unknown";
}

double baseline_comm(const ComplexityInputs& in, BaselineAlgo algo) {
  in.validate();
  const double gap = 1.0 - in.lambda2;
  const double ln_eps = std::log(1.0 / in.epsilon);
  const double m = static_cast<double>(in.m);
  switch (algo) {
    case BaselineAlgo::DAdmm:
      return ln_eps / std::log1p(std::sqrt(gap)) * m;
    case BaselineAlgo::Extra:
      return ln_eps / std::log(2.0 - in.lambda2) * m;
    case BaselineAlgo::ExactDiffusion: {
      // the objective-conditioning constant is taken as 1 (unit constants)
      const double cond = 1.0;
      return ln_eps / std::log1p(gap / (in.lambda2 + cond)) * m;
    }
    case BaselineAlgo::Esdacd: {
      double d_min = in.d_min.value_or(m / in.n);
      return ln_eps * m / std::sqrt(d_min * gap);
    }
    case BaselineAlgo::RwAdmm:
      return ln_eps * m * m / (in.n * std::sqrt(gap));
  }
  throw ParameterError("complexity: unknown baseline");
}

double walkman_comm_nonconvex(const ComplexityInputs& in) {
  in.validate();
  double ln_n = std::log(static_cast<double>(in.n));
  double gap = 1.0 - in.lambda2;
  return (1.0 / in.epsilon) * ln_n * ln_n / (gap * gap);
}

bool walkman_favored(int n, long m, double lambda2) {
  if (n < 2 || m < 1) throw ParameterError("complexity: bad n or m");
  double threshold =
      1.0 - std::pow(std::log(static_cast<double>(n)), 4.0 / 3.0) /
                std::pow(static_cast<double>(m), 2.0 / 3.0);
  return lambda2 <= threshold;
}

LsRateConstants ls_rate_constants(const ConsensusProblem& prob, double beta,
                                  const TransitionMatrix& chain, double delta) {
  if (prob.family != ProblemFamily::LeastSquares || !prob.ls)
    throw ConfigError("ls_rate_constants: least-squares problem required");
  const double sigma_star = prob.ls->sigma_max_star;
  const int n = prob.n;
  LsRateConstants out;
  out.valid = beta > 2.0 * sigma_star + 2.0;
  out.nu = (n - 1) * (beta - sigma_star) / (static_cast<double>(n) * n);
  double ratio = 1.0 - sigma_star / beta;
  out.lbar = beta / n * (1.0 - ratio * ratio / n);
  out.tau = mixing_time(chain, delta);
  Eigen::VectorXd pi = stationary(chain);
  double pi_star = pi.minCoeff();
  out.factor =
      1.0 / (1.0 + n * (1.0 - delta) * pi_star * out.nu / (4.0 * beta * beta * out.tau));
  return out;
}

}  // namespace walkman::theory
