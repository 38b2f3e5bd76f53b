#ifndef WALKMAN_THEORY_HPP_
#define WALKMAN_THEORY_HPP_

#include <optional>
#include <string>

#include "walkman/markov.hpp"
#include "walkman/problems.hpp"

namespace walkman::theory {

//! Inputs for the communication-complexity expressions. All values are
//! reported with unit constants; the tool is for ordering and threshold
//! comparisons, not calibrated absolute counts.
struct ComplexityInputs {
  int n = 0;
  long m = 0;
  double lambda2 = 0.0;  // spectral gap parameter (sigma(P) for symmetric P)
  double pi_star = 0.0;
  double delta = 0.5;
  double epsilon = 1e-6;
  std::optional<double> d_min;  // defaults to m/n when unset

  void validate() const;
};

struct WalkmanComm {
  double epochs = 0.0;
  double per_epoch = 0.0;
  double exact = 0.0;       // epochs * per_epoch
  double simplified = 0.0;  // ln(1/eps) * n ln^3(n) / (1 - lambda2)^2
};

//! Exact epoch-count x comm-per-epoch expression (delta = 1/2 uses the
//! printed closed form; other delta values use the general tau(delta) form)
//! plus the simplified order value.
WalkmanComm walkman_comm(const ComplexityInputs& in);

enum class BaselineAlgo { DAdmm, Extra, ExactDiffusion, Esdacd, RwAdmm };

std::string to_string(BaselineAlgo algo);

double baseline_comm(const ComplexityInputs& in, BaselineAlgo algo);

//! Nonconvex Walkman bound (1/eps) * ln^2(n) / (1 - lambda2)^2.
double walkman_comm_nonconvex(const ComplexityInputs& in);

//! lambda2 <= 1 - ln^{4/3}(n) / m^{2/3}: the regime where the walk-based
//! bound beats every compared method.
bool walkman_favored(int n, long m, double lambda2);

struct LsRateConstants {
  double nu = 0.0;    // strong-convexity modulus claim for h_beta
  double lbar = 0.0;  // gradient-Lipschitz claim for h_beta
  double factor = 0.0;  // per-epoch contraction bound
  int tau = 0;
  bool valid = false;  // beta > 2 sigma*_max + 2
};

LsRateConstants ls_rate_constants(const ConsensusProblem& prob, double beta,
                                  const TransitionMatrix& chain, double delta = 0.5);

}  // namespace walkman::theory

#endif  // WALKMAN_THEORY_HPP_
