#pragma once

#include <Eigen/Core>
#include <span>

namespace symstat {

/// Nodes and weights of a quadrature rule; weights integrate against dx.
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Gauss–Legendre rule on [-1, 1] (Golub–Welsch).
QuadratureRule gauss_legendre(int order);

/// Composite Gauss–Legendre rule on [lo, hi]. Interior breakpoints always
/// start a new panel, so integrands that are smooth between breakpoints keep
/// full Gauss accuracy.
QuadratureRule composite_rule(double lo, double hi, int panels, int order,
                              std::span<const double> breakpoints = {});

template <class F>
double integrate(const QuadratureRule& rule, F&& f) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(rule.nodes[i]);
  return sum;
}

}  // namespace symstat
