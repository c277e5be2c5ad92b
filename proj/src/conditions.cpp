#include "symstat/conditions.hpp"

#include <algorithm>
#include <cmath>

#include "symstat/error.hpp"

namespace symstat {

const ConditionCheck& ConditionReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw Error(ErrorKind::invalid_argument, "no condition named " + name);
}

ConditionReport check_conditions(const HoeffdingDecomposition& dec, const Distribution& dist,
                                 const ConditionParams& params, const ExpectMode& mode, int workers) {
  if (!(params.r > 4.0) || !(params.s > 2.0)) throw Error(ErrorKind::invalid_argument, "need r > 4 and s > 2");
  if (!(params.nu1 > 0.0 && params.nu1 < 0.5) || !(params.nu2 > 0.0))
    throw Error(ErrorKind::invalid_argument, "need 0 < nu1 < 1/2 and nu2 > 0");
  if (!dec.tables) throw Error(ErrorKind::unsupported_mode, "conditions need tabulated kernels");

  CumulantOptions copts;
  copts.orders = {params.r, params.s};
  const CumulantSet cs = cumulants(dec, dist, ExpectMode::exact(), copts);
  const KernelTables& t = *dec.tables;
  const double n = dec.N;

  ConditionReport rep;
  rep.N = dec.N;
  rep.params = params;
  rep.sigma_t2 = dec.variance;
  rep.sigma2 = cs.sigma2.value;
  rep.beta3 = cs.beta3.value;
  rep.g_r = t.weights.dot(t.g.cwiseAbs().array().pow(params.r).matrix());
  rep.gamma_r = cs.gamma.at(params.r).value;
  rep.zeta_s = cs.zeta.at(params.s).value;
  rep.delta4_sq = delta_moment_from_components(dec, 4);

  const double st = std::sqrt(dec.variance);
  const double implied_A = rep.sigma2 / dec.variance;
  const double implied_M = std::max({rep.g_r / std::pow(st, params.r), rep.gamma_r / std::pow(st, params.r),
                                     rep.zeta_s / std::pow(st, params.s)});
  ConditionCheck lower{"moment_lower", implied_A, params.A_star, false, "A_* < implied"};
  lower.holds = params.A_star ? *params.A_star > 0.0 && *params.A_star < 1.0 && implied_A > *params.A_star
                              : implied_A > 0.0;
  rep.checks.push_back(lower);
  ConditionCheck upper{"moment_upper", implied_M, params.M_star, false, "M_* > implied"};
  upper.holds = params.M_star ? implied_M < *params.M_star : std::isfinite(implied_M);
  rep.checks.push_back(upper);

  ConditionCheck diff{"difference", rep.delta4_sq / dec.variance * std::pow(n, 2.0 * params.nu1 - 1.0), params.D_star,
                      false, "D_* >= implied"};
  diff.holds = params.D_star ? diff.implied <= *params.D_star : std::isfinite(diff.implied);
  rep.checks.push_back(diff);

  rep.rho_lower = 1.0 / rep.beta3;
  rep.rho_upper = std::pow(n, params.nu2 + 0.5);
  ConditionCheck cramer{"cramer", 0.0, params.delta, false, "delta <= implied"};
  if (rep.rho_lower < rep.rho_upper) {
    rep.rho = cramer_rho(linear_part_cf(dec, dist), rep.rho_lower, rep.rho_upper);
    cramer.implied = rep.rho.rho;
    cramer.holds = params.delta ? rep.rho.rho >= *params.delta : rep.rho.rho > kRhoFloor;
  } else {
    cramer.note = "empty frequency band";
    cramer.holds = true;
    cramer.implied = 1.0;
  }
  rep.checks.push_back(cramer);

  const ReducibilityReport red = reducibility(dec, dist, mode, kReducibleTolerance, workers);
  rep.delta3_sq = red.delta3_sq;
  rep.nu = std::min({params.nu1, params.nu2, params.s - 2.0, params.r - 4.0}) / 600.0;
  rep.delta3_sq_scaled = red.delta3_sq.value * std::pow(n, 2.0 * rep.nu);
  ConditionCheck nonred{"nonreducibility", std::sqrt(std::max(0.0, red.delta3_sq.value) / dec.variance),
                        params.delta_star, false, "delta_* <= implied"};
  nonred.holds = params.delta_star ? red.delta3_sq.value >= *params.delta_star * *params.delta_star * dec.variance
                                   : !red.reducible;
  rep.checks.push_back(nonred);
  return rep;
}

}  // namespace symstat
