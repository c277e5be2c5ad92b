#include "symstat/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "symstat/combinatorics.hpp"
#include "symstat/error.hpp"
#include "symstat/quadrature.hpp"

namespace symstat {

const char* to_string(CfSource s) {
  switch (s) {
    case CfSource::closed_form: return "closed-form";
    case CfSource::exact_finite_support: return "exact-finite-support";
    case CfSource::quadrature: return "quadrature";
    case CfSource::mc: return "mc";
  }
  return "unknown";
}

CharFunction normal_cf(double mean, double sd) {
  CharFunction cf;
  cf.eval = [mean, sd](double t) {
    return std::exp(-0.5 * sd * sd * t * t) * std::complex<double>(std::cos(mean * t), std::sin(mean * t));
  };
  cf.source = CfSource::closed_form;
  return cf;
}

CharFunction discrete_cf(Eigen::VectorXd values, Eigen::VectorXd weights, CfSource source) {
  auto v = std::make_shared<const Eigen::VectorXd>(std::move(values));
  auto w = std::make_shared<const Eigen::VectorXd>(std::move(weights));
  CharFunction cf;
  cf.eval = [v, w](double t) {
    double re = 0.0, im = 0.0;
    for (Eigen::Index i = 0; i < v->size(); ++i) {
      const double th = t * (*v)[i];
      re += (*w)[i] * std::cos(th);
      im += (*w)[i] * std::sin(th);
    }
    return std::complex<double>(re, im);
  };
  cf.source = source;
  return cf;
}

CharFunction empirical_cf(std::vector<double> sample, std::uint64_t seed) {
  if (sample.empty()) throw Error(ErrorKind::invalid_argument, "empty sample");
  const auto n = static_cast<Eigen::Index>(sample.size());
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(sample.data(), n);
  CharFunction cf = discrete_cf(std::move(v), Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)), CfSource::mc);
  cf.reps = sample.size();
  cf.seed = seed;
  // |e^{itY}| <= 1, so each coordinate has standard deviation at most 1/sqrt(n).
  cf.std_error = 1.0 / std::sqrt(static_cast<double>(n));
  return cf;
}

CharFunction linear_part_cf(const HoeffdingDecomposition& dec, const Distribution& dist, QuadratureOptions options) {
  Eigen::VectorXd values, weights;
  CfSource source = CfSource::exact_finite_support;
  if (dist.is_finite() && dec.tables) {
    values = dec.tables->g;
    weights = dec.tables->weights;
  } else {
    const Distribution fine = dist.quadrature_measure(options);
    const Eigen::VectorXd x = fine.points();
    weights = fine.probabilities();
    values.resize(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) values[i] = dec.g(x[i]);
    source = dist.is_finite() ? CfSource::exact_finite_support : CfSource::quadrature;
  }
  const double sigma = std::sqrt(weights.dot(values.cwiseProduct(values)));
  if (!(sigma > 0.0)) throw Error(ErrorKind::degenerate_linear_part, "E g^2 vanishes");
  return discrete_cf(values / sigma, std::move(weights), source);
}

RhoResult cramer_rho(const CharFunction& cf, double a, double b, const RhoOptions& options) {
  if (!(a > 0.0) || !(a < b)) throw Error(ErrorKind::invalid_range, "need 0 < a < b");
  const int half = std::max(2, options.base_points / 2);
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(2 * half));
  const double ratio = std::pow(b / a, 1.0 / (half - 1));
  for (int i = 0; i < half; ++i) {
    grid.push_back(a + (b - a) * i / (half - 1));
    grid.push_back(a * std::pow(ratio, i));
  }
  grid.front() = a;
  std::sort(grid.begin(), grid.end());
  for (double& t : grid) t = std::clamp(t, a, b);
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  auto value = [&](double t) { return std::max(std::abs(cf(t)), std::abs(cf(-t))); };
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = value(grid[i]);

  RhoResult out;
  out.grid_points = static_cast<int>(grid.size());
  out.relative_width = options.relative_width;
  std::size_t arg = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  out.sup_abs = v[arg];
  out.t_at_sup = grid[arg];

  // Refine the largest local maxima; a cap keeps noisy transforms affordable.
  constexpr std::size_t kMaxRefinements = 16;
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool left = i == 0 || v[i] >= v[i - 1];
    const bool right = i + 1 == grid.size() || v[i] >= v[i + 1];
    if (left && right) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), [&](auto i, auto j) { return v[i] > v[j]; });
  if (peaks.size() > kMaxRefinements) peaks.resize(kMaxRefinements);

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t p : peaks) {
    double lo = grid[p == 0 ? 0 : p - 1];
    double hi = grid[std::min(p + 1, grid.size() - 1)];
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = value(x1), f2 = value(x2);
    while (hi - lo > options.relative_width * std::max(std::abs(lo), std::abs(hi))) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = value(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = value(x1);
      }
    }
    ++out.refinements;
    for (auto [t, f] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
      if (f > out.sup_abs) {
        out.sup_abs = f;
        out.t_at_sup = t;
      }
    }
  }
  out.rho = 1.0 - out.sup_abs;
  return out;
}

namespace {

// Integral of (sin u / u)^k over [0, upper] by Gauss-Legendre on half periods.
double sinc_power_integral(int k, double upper) {
  if (upper <= 0.0) return 0.0;
  const int panels = std::max(8, static_cast<int>(std::ceil(upper / std::numbers::pi)) * 2);
  const QuadratureRule rule = composite_rule(0.0, upper, panels, 20, {});
  return integrate(rule, [k](double u) { return std::pow(std::sin(u) / u, k); });
}

}  // namespace

double smoothing_constant(int k) {
  if (k < 2 || k % 2 != 0) throw Error(ErrorKind::unsupported_mode, "smoothing kernel needs even k >= 2");
  if (k == 2) return 1.0 / std::numbers::pi;
  const double L = 400.0 * std::numbers::pi;
  // Tail beyond L: sin^k averages to C(k, k/2)/2^k against u^{-k}.
  const double mean_power = binomial(k, k / 2) / std::pow(2.0, k);
  const double tail = mean_power * std::pow(L, 1 - k) / (k - 1);
  return 1.0 / (2.0 * (sinc_power_integral(k, L) + tail));
}

SmoothingKernel::SmoothingKernel(double a, int k) : a_(a), k_(k), c_(smoothing_constant(k)) {
  if (!(a > 0.0)) throw Error(ErrorKind::invalid_argument, "smoothing scale must be positive");
}

double SmoothingKernel::density(double x) const {
  const double u = a_ * x;
  if (std::abs(u) < 1e-8) return a_ * c_;
  return a_ * c_ * std::pow(std::sin(u) / u, k_);
}

double SmoothingKernel::cf(double t) const {
  if (std::abs(t) >= k_ * a_) return 0.0;
  if (k_ == 2) return 2.0 * std::numbers::pi * a_ * c_ * (2.0 * a_ - std::abs(t)) / (4.0 * a_ * a_);
  // Irwin-Hall density of the sum of k uniforms, rescaled to [-ka, ka].
  const double x = (k_ * a_ - std::abs(t)) / (2.0 * a_);
  double f = 0.0;
  for (int j = 0; j <= static_cast<int>(std::floor(x)); ++j)
    f += (j % 2 ? -1.0 : 1.0) * binomial(k_, j) * std::pow(x - j, k_ - 1);
  f /= std::tgamma(k_);
  return std::numbers::pi * c_ * f;
}

double SmoothingKernel::mass(double h) const { return 2.0 * c_ * sinc_power_integral(k_, a_ * h); }

double calibrate_smoothing_scale(int k, double target) {
  if (!(target > 0.0 && target < 1.0)) throw Error(ErrorKind::invalid_argument, "target mass must lie in (0, 1)");
  double lo = 1e-3, hi = 1e3;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (SmoothingKernel(mid, k).mass(1.0) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool AlphaBoundReport::all_pass() const {
  return product_pass && std::all_of(points.begin(), points.end(), [](const auto& p) { return p.pass; });
}

AlphaBoundReport verify_alpha_bound(const HoeffdingDecomposition& dec, int grid) {
  if (!dec.tables) throw Error(ErrorKind::unsupported_mode, "alpha bound needs tabulated kernels");
  const KernelTables& t = *dec.tables;
  const double n = dec.N;
  const double s2 = t.weights.dot(t.g.cwiseProduct(t.g));
  if (!(s2 > 0.0)) throw Error(ErrorKind::degenerate_linear_part, "E g^2 vanishes");
  const double beta3 = t.weights.dot(t.g.cwiseAbs().array().cube().matrix()) / (s2 * std::sqrt(s2));

  // g_1 = N^{-1/2} g, taken with sigma_T = 1.
  const Eigen::VectorXd g1 = t.g / (std::sqrt(n) * std::sqrt(dec.variance));
  const CharFunction alpha = discrete_cf(g1, t.weights);

  AlphaBoundReport report;
  report.N = dec.N;
  report.beta3 = beta3;
  report.t_max = std::sqrt(n) / (1e3 * beta3);
  report.subset_sizes = {1, 2};
  for (int size : {dec.N / 10, dec.N / 2, dec.N})
    if (size > 2 && std::find(report.subset_sizes.begin(), report.subset_sizes.end(), size) == report.subset_sizes.end())
      report.subset_sizes.push_back(size);

  for (int i = 0; i < grid; ++i) {
    const double tt = grid == 1 ? 0.0 : report.t_max * i / (grid - 1);
    AlphaBoundPoint p;
    p.t = tt;
    p.abs_alpha = std::abs(alpha(tt));
    p.bound = 1.0 - tt * tt / (4.0 * n);
    p.pass = p.abs_alpha <= p.bound + kAlphaSlack;
    report.points.push_back(p);
    for (int size : report.subset_sizes) {
      const double lhs = size * std::log(p.abs_alpha);
      const double rhs = -size * tt * tt / (4.0 * n);
      if (lhs > rhs + size * kAlphaSlack) report.product_pass = false;
    }
  }
  return report;
}

}  // namespace symstat
