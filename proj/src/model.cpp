#include "symstat/model.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "symstat/combinatorics.hpp"
#include "symstat/error.hpp"
#include "symstat/quadrature.hpp"

namespace symstat {

namespace {

// Marsaglia polar method; both variates of the pair are returned.
std::pair<double, double> normal_pair(Rng& rng) {
  for (;;) {
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double v = 2.0 * uniform01(rng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      const double f = std::sqrt(-2.0 * std::log(s) / s);
      return {u * f, v * f};
    }
  }
}

}  // namespace

Distribution Distribution::finite(std::vector<Atom> support, std::uint64_t seed) {
  if (support.empty()) throw Error(ErrorKind::invalid_argument, "finite distribution needs support points");
  double total = 0.0;
  for (const Atom& a : support) {
    if (!(a.prob > 0.0)) throw Error(ErrorKind::invalid_argument, "support probabilities must be positive");
    if (!std::isfinite(a.point)) throw Error(ErrorKind::invalid_argument, "support points must be finite");
    total += a.prob;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(ErrorKind::invalid_argument, "support probabilities must sum to 1");
  std::vector<double> pts;
  for (const Atom& a : support) pts.push_back(a.point);
  std::sort(pts.begin(), pts.end());
  if (std::adjacent_find(pts.begin(), pts.end()) != pts.end())
    throw Error(ErrorKind::invalid_argument, "support points must be distinct");

  Distribution d;
  d.law_ = Law::finite;
  d.support_ = std::move(support);
  d.seed_ = seed;
  double acc = 0.0, mean = 0.0, second = 0.0;
  for (const Atom& a : d.support_) {
    acc += a.prob;
    d.cumulative_.push_back(acc);
    mean += a.prob * a.point;
    second += a.prob * a.point * a.point;
  }
  d.hint_ = MomentsHint{mean, second - mean * mean};
  return d;
}

Distribution Distribution::normal(double mean, double sd, std::uint64_t seed) {
  if (!(sd > 0.0)) throw Error(ErrorKind::invalid_argument, "normal sd must be positive");
  Distribution d;
  d.law_ = Law::normal;
  d.a_ = mean;
  d.b_ = sd;
  d.seed_ = seed;
  d.hint_ = MomentsHint{mean, sd * sd};
  return d;
}

Distribution Distribution::uniform(double lo, double hi, std::uint64_t seed) {
  if (!(hi > lo)) throw Error(ErrorKind::invalid_range, "uniform law needs lo < hi");
  Distribution d;
  d.law_ = Law::uniform;
  d.a_ = lo;
  d.b_ = hi;
  d.seed_ = seed;
  d.hint_ = MomentsHint{0.5 * (lo + hi), (hi - lo) * (hi - lo) / 12.0};
  return d;
}

Distribution Distribution::rademacher(std::uint64_t seed) {
  Distribution d;
  d.law_ = Law::rademacher;
  d.support_ = {{-1.0, 0.5}, {1.0, 0.5}};
  d.cumulative_ = {0.5, 1.0};
  d.seed_ = seed;
  d.hint_ = MomentsHint{0.0, 1.0};
  return d;
}

std::size_t Distribution::support_size() const { return support().size(); }

const std::vector<Atom>& Distribution::support() const {
  if (!is_finite())
    throw Error(ErrorKind::unsupported_mode, "sampler-backed distribution has no enumerable support");
  return support_;
}

Eigen::VectorXd Distribution::points() const {
  const auto& s = support();
  Eigen::VectorXd v(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) v[static_cast<Eigen::Index>(i)] = s[i].point;
  return v;
}

Eigen::VectorXd Distribution::probabilities() const {
  const auto& s = support();
  Eigen::VectorXd v(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) v[static_cast<Eigen::Index>(i)] = s[i].prob;
  return v;
}

Distribution Distribution::with_seed(std::uint64_t seed) const {
  Distribution d = *this;
  d.seed_ = seed;
  return d;
}

double Distribution::draw(Rng& rng) const {
  switch (law_) {
    case Law::finite: {
      const double u = uniform01(rng);
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                             support_.size() - 1);
      return support_[idx].point;
    }
    case Law::normal: return a_ + b_ * normal_pair(rng).first;
    case Law::uniform: return a_ + (b_ - a_) * uniform01(rng);
    case Law::rademacher: return (rng() >> 63) ? 1.0 : -1.0;
  }
  return 0.0;
}

void Distribution::draw(Rng& rng, std::span<double> out) const {
  if (law_ == Law::normal) {
    std::size_t i = 0;
    for (; i + 1 < out.size(); i += 2) {
      const auto [z1, z2] = normal_pair(rng);
      out[i] = a_ + b_ * z1;
      out[i + 1] = a_ + b_ * z2;
    }
    if (i < out.size()) out[i] = a_ + b_ * normal_pair(rng).first;
    return;
  }
  for (double& x : out) x = draw(rng);
}

Distribution Distribution::quadrature_measure(const QuadratureOptions& options) const {
  switch (law_) {
    case Law::finite: return *this;
    case Law::rademacher: return finite({{-1.0, 0.5}, {1.0, 0.5}}, seed_);
    case Law::normal:
    case Law::uniform: {
      const bool gaussian = law_ == Law::normal;
      const double lo = gaussian ? a_ - options.normal_halfwidth * b_ : a_;
      const double hi = gaussian ? a_ + options.normal_halfwidth * b_ : b_;
      const QuadratureRule rule = composite_rule(lo, hi, options.panels, options.order, options.breakpoints);
      std::vector<Atom> atoms;
      atoms.reserve(static_cast<std::size_t>(rule.nodes.size()));
      double total = 0.0;
      for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
        const double x = rule.nodes[i];
        double density = 1.0 / (hi - lo);
        if (gaussian) {
          const double z = (x - a_) / b_;
          density = std::exp(-0.5 * z * z) / (b_ * std::sqrt(2.0 * M_PI));
        }
        atoms.push_back({x, rule.weights[i] * density});
        total += atoms.back().prob;
      }
      for (Atom& a : atoms) a.prob /= total;
      return finite(std::move(atoms), seed_);
    }
  }
  return *this;
}

std::string Distribution::describe() const {
  std::ostringstream os;
  switch (law_) {
    case Law::finite: os << "finite(" << support_.size() << " atoms)"; break;
    case Law::normal: os << "normal(" << a_ << ", " << b_ << ")"; break;
    case Law::uniform: os << "uniform(" << a_ << ", " << b_ << ")"; break;
    case Law::rademacher: os << "rademacher"; break;
  }
  return os.str();
}

Estimate expect(const Distribution& dist, const RealFn& f, int m, const ExpectMode& mode) {
  if (m < 1) throw Error(ErrorKind::invalid_argument, "expect needs at least one argument");
  std::vector<double> x(static_cast<std::size_t>(m));

  if (mode.is_exact()) {
    const auto& support = dist.support();
    const std::size_t s = support.size();
    if (std::pow(static_cast<double>(s), m) > kEnumerationBudget)
      throw Error(ErrorKind::budget, "exact enumeration exceeds 1e8 product points");
    std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
    double total = 0.0;
    for (;;) {
      double w = 1.0;
      for (int j = 0; j < m; ++j) {
        x[j] = support[idx[j]].point;
        w *= support[idx[j]].prob;
      }
      total += w * f(x);
      int j = 0;
      while (j < m && ++idx[j] == s) idx[j++] = 0;
      if (j == m) break;
    }
    return {total, 0.0};
  }

  if (mode.reps < 2) throw Error(ErrorKind::invalid_argument, "Monte Carlo expectation needs reps >= 2");
  Rng rng = make_stream(mode.seed, 0);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t r = 0; r < mode.reps; ++r) {
    dist.draw(rng, x);
    const double v = f(x);
    const double delta = v - mean;
    mean += delta / static_cast<double>(r + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(mode.reps - 1);
  return {mean, std::sqrt(var / static_cast<double>(mode.reps))};
}

SymmetricKernel::SymmetricKernel(int arity, RealFn fn, bool symmetry_certified)
    : arity_(arity), fn_(std::move(fn)), certified_(symmetry_certified) {
  if (arity < 1) throw Error(ErrorKind::invalid_argument, "kernel arity must be positive");
}

SymmetricKernel SymmetricKernel::zero(int arity) {
  return SymmetricKernel(arity, [](std::span<const double>) { return 0.0; }, true);
}

double SymmetricKernel::operator()(double x) const { return fn_(std::span<const double>(&x, 1)); }

double SymmetricKernel::operator()(double x, double y) const {
  const double a[2] = {x, y};
  return fn_(a);
}

double SymmetricKernel::operator()(double x, double y, double z) const {
  const double a[3] = {x, y, z};
  return fn_(a);
}

SymmetricKernel named_kernel(std::string_view name) {
  if (name == "abs_diff")
    return SymmetricKernel(2, [](std::span<const double> v) { return std::abs(v[0] - v[1]); }, true);
  if (name == "product")
    return SymmetricKernel(2, [](std::span<const double> v) { return v[0] * v[1]; }, true);
  if (name == "sum")
    return SymmetricKernel(2, [](std::span<const double> v) { return v[0] + v[1]; }, true);
  if (name == "product_plus_sum")
    return SymmetricKernel(2, [](std::span<const double> v) { return v[0] * v[1] + v[0] + v[1]; }, true);
  if (name == "square_diff")
    return SymmetricKernel(
        2, [](std::span<const double> v) { return 0.5 * (v[0] - v[1]) * (v[0] - v[1]); }, true);
  if (name == "constant") return SymmetricKernel(2, [](std::span<const double>) { return 1.0; }, true);
  throw Error(ErrorKind::invalid_argument, "unknown kernel '" + std::string(name) + "'");
}

SymmetricStatistic::SymmetricStatistic(int size, RealFn fn, std::string description,
                                       std::optional<QuadraticForm> quadratic)
    : size_(size), fn_(std::move(fn)), description_(std::move(description)), quadratic_(std::move(quadratic)) {
  if (size < 1) throw Error(ErrorKind::invalid_size, "statistic needs N >= 1");
}

SymmetricStatistic u_statistic(const SymmetricKernel& h, int N) {
  if (N < 2) throw Error(ErrorKind::invalid_size, "U-statistic needs N >= 2");
  if (h.arity() != 2) throw Error(ErrorKind::invalid_argument, "U-statistic kernel must have arity 2");
  const double scale = 0.5 * std::sqrt(static_cast<double>(N)) / binomial(N, 2);
  auto fn = [h, scale](std::span<const double> in) {
    // Sorting fixes the summation order, so permuted inputs give bit-identical results.
    std::vector<double> x(in.begin(), in.end());
    std::sort(x.begin(), x.end());
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = i + 1; j < x.size(); ++j) total += h(x[i], x[j]);
    return scale * total;
  };
  QuadraticForm form{[](double) { return 0.0; }, [h, scale](double x, double y) { return scale * h(x, y); }, {}};
  return SymmetricStatistic(N, fn, "u_statistic", std::move(form));
}

SymmetricStatistic gini_statistic(int N) {
  if (N < 2) throw Error(ErrorKind::invalid_size, "U-statistic needs N >= 2");
  const double scale = 0.5 * std::sqrt(static_cast<double>(N)) / binomial(N, 2);
  auto fn = [scale](std::span<const double> x) {
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) total += (2.0 * static_cast<double>(i) - n + 1.0) * v[i];
    return scale * total;
  };
  QuadraticForm form{[](double) { return 0.0; }, [scale](double x, double y) { return scale * std::abs(x - y); }, {}};
  return SymmetricStatistic(N, fn, "gini", std::move(form));
}

SymmetricStatistic linear_statistic(std::function<double(double)> f, int N, std::string description) {
  auto fn = [f](std::span<const double> x) {
    double total = 0.0;
    for (double v : x) total += f(v);
    return total;
  };
  QuadraticForm form{f, [](double, double) { return 0.0; }, {}};
  return SymmetricStatistic(N, fn, std::move(description), std::move(form));
}

SymmetricStatistic sample_mean(int N) {
  const double inv = 1.0 / N;
  return linear_statistic([inv](double x) { return inv * x; }, N, "sample_mean");
}

double nearest_integer(double x) {
  // nearbyint honours the current rounding mode; FE_TONEAREST is ties-to-even.
  return std::nearbyint(x);
}

SymmetricStatistic example1_statistic(int N) {
  if (N < 1) throw Error(ErrorKind::invalid_size, "statistic needs N >= 1");
  const double root = std::sqrt(static_cast<double>(N));
  auto fn = [root, N](std::span<const double> x) {
    double w = 0.0, v = 0.0;
    for (double xj : x) {
      const double y = root * xj;
      const double whole = nearest_integer(y);
      w += whole;
      v += y - whole;
    }
    w /= N;
    v /= root;
    return (w + v / root) * (1.0 - v / root);
  };

  // W + N^{-1/2} V = N^{-1/2} sum X_j, hence
  // T = N^{-1/2} sum X_i - N^{-3/2} sum_i X_i b_i - N^{-3/2} sum_{i<j} (X_i b_j + X_j b_i).
  auto frac = [root](double x) {
    const double y = root * x;
    return y - nearest_integer(y);
  };
  const double c1 = 1.0 / root;
  const double c3 = 1.0 / (root * N);
  QuadraticForm form;
  form.linear = [frac, c1, c3](double x) { return c1 * x - c3 * x * frac(x); };
  form.pairwise = [frac, c3](double x, double y) { return -c3 * (x * frac(y) + y * frac(x)); };
  const int reach = static_cast<int>(std::ceil(root)) + 1;
  for (int k = -reach; k <= reach; ++k) form.breakpoints.push_back((k + 0.5) / root);
  return SymmetricStatistic(N, fn, "example1", std::move(form));
}

}  // namespace symstat
