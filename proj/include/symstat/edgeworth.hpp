#pragma once

#include <complex>
#include <span>
#include <vector>

namespace symstat {

double normal_cdf(double x);
double normal_pdf(double x);

enum class ExpansionOrder { zero, one, two };

/// G(x) = Phi(x) - N^{-1/2}(kappa3/6) He2(x) phi(x)
///        - N^{-1}((kappa3^2/72) He5(x) + (kappa4/24) He3(x)) phi(x),
/// truncated after the requested order.
struct Expansion {
  int N = 1;
  double kappa3 = 0.0;
  double kappa4 = 0.0;
  ExpansionOrder order = ExpansionOrder::two;

  Expansion with_order(ExpansionOrder o) const { return {N, kappa3, kappa4, o}; }
};

/// The separate pieces of G(x); `evaluate` is their sum up to the order.
struct ExpansionTerms {
  double normal = 0.0;
  double skewness = 0.0;  // order N^{-1/2}
  double kurtosis = 0.0;  // kappa4 part of order N^{-1}
  double skewness_sq = 0.0;  // kappa3^2 part of order N^{-1}
};

ExpansionTerms expansion_terms(const Expansion& e, double x);
double evaluate(const Expansion& e, double x);

/// G'(x) = phi(x) (1 + A He3 + C He4 + B He6).
double density(const Expansion& e, double x);

/// Coefficients (lowest degree first) of the polynomial q with G' = phi q.
std::vector<double> density_polynomial(const Expansion& e);

/// Real roots of a polynomial given lowest degree first.
std::vector<double> real_roots(std::span<const double> coeffs);

/// sup_x |G'(x)|, attained at a real root of q' - x q.
double derivative_bound(const Expansion& e);

/// Integral of e^{itx} dG(x) = e^{-t^2/2}(1 + A (it)^3 + C (it)^4 + B (it)^6).
std::complex<double> fourier_transform(const Expansion& e, double t);

struct KolmogorovResult {
  double distance = 0.0;
  double at = 0.0;  // location of the supremum
};

/// Exact sup_x |F_n(x) - G(x)| for the empirical CDF of a sorted sample: both
/// sides of every jump, plus interior critical points of G.
KolmogorovResult kolmogorov_distance(std::span<const double> sorted, const Expansion& e);

}  // namespace symstat
