#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "symstat/hoeffding.hpp"

namespace symstat {

/// How a moment functional was obtained.
enum class Provenance { exact, quadrature, mc };

const char* to_string(Provenance p);

/// Expansion inputs. Entries carry standard errors in MC mode (zero otherwise).
struct CumulantSet {
  Estimate sigma2;  // E g^2(X_1)
  Estimate beta3;   // sigma^{-3} E|g(X_1)|^3
  Estimate kappa3;
  Estimate kappa4;
  std::map<double, Estimate> gamma;  // t -> E|psi(X_1, X_2)|^t
  std::map<double, Estimate> zeta;   // t -> E|chi(X_1, X_2, X_3)|^t
  Provenance provenance = Provenance::exact;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

struct CumulantOptions {
  std::vector<double> orders = {2.0, 3.0, 4.0};  // exponents t for gamma_t and zeta_t
  int workers = 1;
};

/// kappa3 = sigma^{-3}(E g^3 + 3 E g1 g2 psi12),
/// kappa4 = sigma^{-4}(E g^4 - 3 sigma^4 + 12 E g1^2 g2 psi12 + 12 E g1 g2 psi13 psi23 + 4 E g1 g2 g3 chi).
/// Exact mode sums over the decomposition tables; MC mode samples triples
/// (X_1, X_2, X_3) and propagates errors to first order.
CumulantSet cumulants(const HoeffdingDecomposition& dec, const Distribution& dist, const ExpectMode& mode,
                      const CumulantOptions& options = {});

/// Distance of psi from the reducible form b(x)g(y) + b(y)g(x).
struct ReducibilityReport {
  Eigen::VectorXd b_points;  // support points (exact) or interpolation grid (MC)
  Eigen::VectorXd b_values;
  double sigma2 = 0.0;
  double sigma_t2 = 0.0;
  double kappa = 0.0;  // E psi(X_1, X_2) g(X_1) g(X_2)
  Estimate delta3_sq;
  double tolerance = 0.0;
  bool reducible = false;
  Eigen::MatrixXd residual;  // psi** on the table points; empty in MC mode
  Provenance provenance = Provenance::exact;

  double b(double x) const;  // piecewise-linear in MC mode, table lookup in exact mode
};

inline constexpr double kReducibleTolerance = 1e-8;
inline constexpr int kProjectionGrid = 512;

/// b(x) = sigma^{-2} E(psi(X_1, X_2) g(X_2) | X_1 = x) - (kappa / 2 sigma^4) g(x),
/// psi** = psi - b(x)g(y) - b(y)g(x), delta3^2 = E psi**^2.
/// Exact mode: verdict delta3^2 < tol * sigma_T^2. MC mode: b is tabulated on a
/// grid from the quadrature tables and delta3^2 is averaged over `reps` pairs;
/// verdict delta3^2 < 3 standard errors.
ReducibilityReport reducibility(const HoeffdingDecomposition& dec, const Distribution& dist, const ExpectMode& mode,
                                double tol = kReducibleTolerance, int workers = 1);

}  // namespace symstat
