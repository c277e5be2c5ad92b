#include "symstat/edgeworth.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "symstat/error.hpp"

namespace symstat {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

namespace {

struct Coefficients {
  double a = 0.0;  // kappa3 / (6 sqrt N)
  double b = 0.0;  // kappa3^2 / (72 N)
  double c = 0.0;  // kappa4 / (24 N)
};

Coefficients coefficients(const Expansion& e) {
  Coefficients k;
  const double n = e.N;
  if (e.order != ExpansionOrder::zero) k.a = e.kappa3 / (6.0 * std::sqrt(n));
  if (e.order == ExpansionOrder::two) {
    k.b = e.kappa3 * e.kappa3 / (72.0 * n);
    k.c = e.kappa4 / (24.0 * n);
  }
  return k;
}

double horner(std::span<const double> p, double x) {
  double r = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
  return r;
}

}  // namespace

ExpansionTerms expansion_terms(const Expansion& e, double x) {
  const Coefficients k = coefficients(e);
  const double phi = normal_pdf(x);
  const double x2 = x * x;
  ExpansionTerms t;
  t.normal = normal_cdf(x);
  t.skewness = -k.a * (x2 - 1.0) * phi;
  t.skewness_sq = -k.b * x * (x2 * x2 - 10.0 * x2 + 15.0) * phi;
  t.kurtosis = -k.c * x * (x2 - 3.0) * phi;
  return t;
}

double evaluate(const Expansion& e, double x) {
  const ExpansionTerms t = expansion_terms(e, x);
  return t.normal + t.skewness + (t.kurtosis + t.skewness_sq);
}

std::vector<double> density_polynomial(const Expansion& e) {
  const Coefficients k = coefficients(e);
  // He3 = x^3 - 3x, He4 = x^4 - 6x^2 + 3, He6 = x^6 - 15x^4 + 45x^2 - 15.
  return {1.0 + 3.0 * k.c - 15.0 * k.b, -3.0 * k.a, -6.0 * k.c + 45.0 * k.b, k.a, k.c - 15.0 * k.b, 0.0, k.b};
}

double density(const Expansion& e, double x) {
  const std::vector<double> q = density_polynomial(e);
  return normal_pdf(x) * horner(q, x);
}

std::vector<double> real_roots(std::span<const double> coeffs) {
  std::vector<double> p(coeffs.begin(), coeffs.end());
  const double scale = p.empty() ? 0.0 : std::abs(*std::max_element(p.begin(), p.end(), [](double u, double v) {
    return std::abs(u) < std::abs(v);
  }));
  while (!p.empty() && std::abs(p.back()) <= 1e-300 + 1e-14 * scale) p.pop_back();
  if (p.size() < 2) return {};
  const auto deg = static_cast<Eigen::Index>(p.size() - 1);
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  for (Eigen::Index i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < deg; ++i) companion(i, deg - 1) = -p[static_cast<std::size_t>(i)] / p.back();
  const Eigen::VectorXcd eig = companion.eigenvalues();

  std::vector<double> dp(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) dp[i - 1] = static_cast<double>(i) * p[i];
  std::vector<double> roots;
  for (const auto& z : eig) {
    if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z))) continue;
    double x = z.real();
    for (int it = 0; it < 8; ++it) {
      const double d = horner(dp, x);
      if (d == 0.0) break;
      const double step = horner(p, x) / d;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

double derivative_bound(const Expansion& e) {
  const std::vector<double> q = density_polynomial(e);
  // (phi q)' = phi (q' - x q).
  std::vector<double> r(q.size() + 1, 0.0);
  for (std::size_t i = 1; i < q.size(); ++i) r[i - 1] += static_cast<double>(i) * q[i];
  for (std::size_t i = 0; i < q.size(); ++i) r[i + 1] -= q[i];
  double best = std::abs(density(e, 0.0));
  for (double x : real_roots(r)) best = std::max(best, std::abs(density(e, x)));
  return best;
}

std::complex<double> fourier_transform(const Expansion& e, double t) {
  const Coefficients k = coefficients(e);
  const std::complex<double> it(0.0, t);
  const std::complex<double> it3 = it * it * it;
  const std::complex<double> it4 = it3 * it;
  const std::complex<double> it6 = it4 * it * it;
  return std::exp(-0.5 * t * t) * (1.0 + k.a * it3 + k.c * it4 + k.b * it6);
}

KolmogorovResult kolmogorov_distance(std::span<const double> sorted, const Expansion& e) {
  if (sorted.empty()) throw Error(ErrorKind::invalid_argument, "empty sample");
  const double n = static_cast<double>(sorted.size());
  KolmogorovResult best;
  auto consider = [&](double x, double F, double G) {
    const double d = std::abs(F - G);
    if (d > best.distance) best = {d, x};
  };

  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double x = sorted[i];
    const double G = evaluate(e, x);
    consider(x, static_cast<double>(i) / n, G);  // F(x-)
    consider(x, static_cast<double>(j) / n, G);  // F(x)
    i = j;
  }

  // G need not be monotone; its turning points can beat the jump points.
  for (double r : real_roots(density_polynomial(e))) {
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), r) - sorted.begin();
    consider(r, static_cast<double>(count) / n, evaluate(e, r));
  }
  return best;
}

}  // namespace symstat
