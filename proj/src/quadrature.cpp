#include "symstat/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "symstat/error.hpp"

namespace symstat {

QuadratureRule gauss_legendre(int order) {
  if (order < 1) throw Error(ErrorKind::invalid_argument, "Gauss-Legendre order must be positive");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadratureRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = 2.0 * solver.eigenvectors().row(0).array().square().transpose();
  // Newton polish on P_n; the eigen solver alone is only ~1e-15 accurate.
  auto legendre = [order](double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = order * (x * p1 - p0) / (x * x - 1.0);
    return std::pair{p1, dp};
  };
  for (int i = 0; i < order; ++i) {
    double x = rule.nodes[i];
    for (int it = 0; it < 3; ++it) {
      const auto [p, dp] = legendre(x);
      x -= p / dp;
    }
    const double dp = legendre(x).second;
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

QuadratureRule composite_rule(double lo, double hi, int panels, int order,
                              std::span<const double> breakpoints) {
  if (!(hi > lo)) throw Error(ErrorKind::invalid_range, "composite rule needs lo < hi");
  if (panels < 1) throw Error(ErrorKind::invalid_argument, "composite rule needs at least one panel");

  std::vector<double> cuts{lo};
  std::vector<double> inner(breakpoints.begin(), breakpoints.end());
  std::sort(inner.begin(), inner.end());
  for (double b : inner)
    if (b > lo && b < hi && b > cuts.back()) cuts.push_back(b);
  cuts.push_back(hi);

  // Panels are shared among segments in proportion to length, at least one each.
  const double width = hi - lo;
  std::vector<int> per_segment;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double share = (cuts[i + 1] - cuts[i]) / width * panels;
    per_segment.push_back(std::max(1, static_cast<int>(std::ceil(share - 1e-9))));
  }

  const QuadratureRule base = gauss_legendre(order);
  int total = 0;
  for (int p : per_segment) total += p * order;
  QuadratureRule rule{Eigen::VectorXd(total), Eigen::VectorXd(total)};
  int at = 0;
  for (std::size_t seg = 0; seg < per_segment.size(); ++seg) {
    const double h = (cuts[seg + 1] - cuts[seg]) / per_segment[seg];
    for (int p = 0; p < per_segment[seg]; ++p) {
      const double a = cuts[seg] + p * h;
      for (int q = 0; q < order; ++q) {
        rule.nodes[at] = a + 0.5 * h * (base.nodes[q] + 1.0);
        rule.weights[at] = 0.5 * h * base.weights[q];
        ++at;
      }
    }
  }
  return rule;
}

}  // namespace symstat
