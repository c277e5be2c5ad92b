#pragma once

#include <optional>
#include <string>
#include <vector>

#include "symstat/charfn.hpp"
#include "symstat/cumulants.hpp"

namespace symstat {

/// Exponents and optional constants of the moment, difference, Cramér and
/// non-reducibility conditions. Unset constants are reported, not judged.
struct ConditionParams {
  double r = 5.0;    // > 4
  double s = 3.0;    // > 2
  double nu1 = 0.25;  // in (0, 1/2)
  double nu2 = 0.25;  // > 0
  std::optional<double> A_star, M_star, D_star, delta, delta_star;
};

struct ConditionCheck {
  std::string name;
  double implied = 0.0;  // smallest (or largest) admissible constant
  std::optional<double> given;
  bool holds = false;
  std::string note;
};

/// Below this rho the supremum cannot be told apart from 1 at the grid resolution.
inline constexpr double kRhoFloor = 1e-6;

struct ConditionReport {
  int N = 0;
  double sigma_t2 = 0.0;
  double sigma2 = 0.0;
  double beta3 = 0.0;
  double g_r = 0.0;      // E|g|^r
  double gamma_r = 0.0;  // E|psi|^r
  double zeta_s = 0.0;   // E|chi|^s
  double delta4_sq = 0.0;
  RhoResult rho;
  double rho_lower = 0.0;  // beta3^{-1}
  double rho_upper = 0.0;  // N^{nu2 + 1/2}
  Estimate delta3_sq;
  double nu = 0.0;  // min{nu1, nu2, s - 2, r - 4} / 600
  double delta3_sq_scaled = 0.0;  // delta3^2 N^{2 nu}
  ConditionParams params;
  std::vector<ConditionCheck> checks;  // moment_lower, moment_upper, difference, cramer, nonreducibility

  const ConditionCheck& check(const std::string& name) const;
};

/// Evaluates every condition on the decomposition tables; `mode` selects how
/// delta3^2 is computed.
ConditionReport check_conditions(const HoeffdingDecomposition& dec, const Distribution& dist,
                                 const ConditionParams& params, const ExpectMode& mode = ExpectMode::exact(),
                                 int workers = 1);

}  // namespace symstat
