#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "symstat/hoeffding.hpp"

namespace symstat {

enum class CfSource { closed_form, exact_finite_support, quadrature, mc };

const char* to_string(CfSource s);

/// t -> E exp{itY} with its provenance. `std_error` bounds the MC error of
/// each evaluation (zero otherwise).
struct CharFunction {
  std::function<std::complex<double>(double)> eval;
  CfSource source = CfSource::closed_form;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  double std_error = 0.0;

  std::complex<double> operator()(double t) const { return eval(t); }
};

CharFunction normal_cf(double mean = 0.0, double sd = 1.0);

/// sum_j w_j exp{it y_j}.
CharFunction discrete_cf(Eigen::VectorXd values, Eigen::VectorXd weights,
                         CfSource source = CfSource::exact_finite_support);

/// Empirical characteristic function of a sample.
CharFunction empirical_cf(std::vector<double> sample, std::uint64_t seed);

/// Characteristic function of g(X_1)/sigma. Finite laws use the support;
/// continuous laws use a fine quadrature measure (`options.panels` panels) on
/// which the kernel g is evaluated directly.
CharFunction linear_part_cf(const HoeffdingDecomposition& dec, const Distribution& dist,
                            QuadratureOptions options = {4096, 8, 10.0, {}});

struct RhoOptions {
  int base_points = 4096;
  double relative_width = 1e-6;
};

struct RhoResult {
  double rho = 0.0;
  double sup_abs = 0.0;
  double t_at_sup = 0.0;
  int grid_points = 0;
  int refinements = 0;
  double relative_width = 0.0;
};

/// rho(a, b) = 1 - sup{|cf(t)| : a <= |t| <= b} by a linear plus geometric
/// grid with golden-section refinement around every local maximum.
RhoResult cramer_rho(const CharFunction& cf, double a, double b, const RhoOptions& options = {});

/// g_{a,k}(x) = a c(k) (ax)^{-k} sin^k(ax), a probability density for even k.
class SmoothingKernel {
 public:
  SmoothingKernel(double a, int k);

  double a() const { return a_; }
  int k() const { return k_; }
  double c() const { return c_; }

  double density(double x) const;

  /// 2 pi a c(k) u^{*k}(t), where u is the uniform density on [-a, a];
  /// zero for |t| >= k a.
  double cf(double t) const;

  /// mu([-h, h]).
  double mass(double h) const;

 private:
  double a_;
  int k_;
  double c_;
};

/// c(k) = 1 / integral of (sin u / u)^k; closed form for k = 2, quadrature otherwise.
double smoothing_constant(int k);

/// The scale a with mu([-1, 1]) = target for the k-kernel, by bisection.
double calibrate_smoothing_scale(int k = 2, double target = 0.75);

struct AlphaBoundPoint {
  double t = 0.0;
  double abs_alpha = 0.0;
  double bound = 0.0;  // 1 - t^2 / 4N
  bool pass = false;
};

struct AlphaBoundReport {
  int N = 0;
  double beta3 = 0.0;
  double t_max = 0.0;  // N^{1/2} / (10^3 beta3)
  std::vector<AlphaBoundPoint> points;
  std::vector<int> subset_sizes;
  bool product_pass = true;
  bool all_pass() const;
};

inline constexpr double kAlphaSlack = 1e-14;

/// |alpha(t)| <= 1 - t^2/4N for |t| <= N^{1/2}/(10^3 beta3), where alpha is the
/// characteristic function of g_1(X)/sigma_T, and |alpha|^|B| <= exp(-|B| t^2/4N).
/// Comparisons allow kAlphaSlack for rounding in |alpha| near 1.
AlphaBoundReport verify_alpha_bound(const HoeffdingDecomposition& dec, int grid = 257);

}  // namespace symstat
