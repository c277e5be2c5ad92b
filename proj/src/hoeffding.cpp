#include "symstat/hoeffding.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <memory>
#include <unordered_map>

#include "symstat/combinatorics.hpp"
#include "symstat/error.hpp"

namespace symstat {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Integrates out the last of k coordinates.
std::vector<double> contract_last(const std::vector<double>& in, int k, std::size_t s, const Eigen::VectorXd& w) {
  const std::size_t block = ipow(s, k - 1);
  std::vector<double> out(block, 0.0);
  for (std::size_t x = 0; x < s; ++x) {
    const double wx = w[static_cast<Eigen::Index>(x)];
    const double* src = in.data() + x * block;
    for (std::size_t i = 0; i < block; ++i) out[i] += wx * src[i];
  }
  return out;
}

// Applies (I - E_axis) in place to an s^k table.
void center_axis(std::vector<double>& t, std::size_t s, int axis, const Eigen::VectorXd& w) {
  const std::size_t stride = ipow(s, axis);
  const std::size_t span = stride * s;
  for (std::size_t hi = 0; hi < t.size(); hi += span) {
    for (std::size_t lo = 0; lo < stride; ++lo) {
      const std::size_t base = hi + lo;
      double mean = 0.0;
      for (std::size_t x = 0; x < s; ++x) mean += w[static_cast<Eigen::Index>(x)] * t[base + x * stride];
      for (std::size_t x = 0; x < s; ++x) t[base + x * stride] -= mean;
    }
  }
}

bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

CanonicalComponents::CanonicalComponents(const SymmetricStatistic& T, const Distribution& dist)
    : N_(T.size()), s_(dist.support_size()), points_(dist.points()), weights_(dist.probabilities()) {
  if (std::pow(static_cast<double>(s_), N_) > kTableBudget)
    throw Error(ErrorKind::budget, "exact decomposition table exceeds s^N <= 4^12");

  // The statistic is symmetric, so it is evaluated once per multiset of support indices.
  const std::size_t total = ipow(s_, N_);
  std::vector<double> full(total);
  std::vector<std::size_t> digits(static_cast<std::size_t>(N_), 0);
  std::vector<int> counts(s_, 0);
  counts[0] = N_;
  std::vector<double> x(static_cast<std::size_t>(N_), points_[0]);
  std::unordered_map<std::uint64_t, double> cache;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::uint64_t key = 0;
    for (std::size_t v = 0; v < s_; ++v) key = key * static_cast<std::uint64_t>(N_ + 1) + static_cast<std::uint64_t>(counts[v]);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, T(x)).first;
    full[flat] = it->second;
    // Odometer with coordinate 0 fastest, matching stride s^j for coordinate j.
    for (std::size_t j = 0; j < digits.size(); ++j) {
      --counts[digits[j]];
      if (++digits[j] == s_) {
        digits[j] = 0;
        ++counts[0];
        x[j] = points_[0];
        continue;
      }
      ++counts[digits[j]];
      x[j] = points_[static_cast<Eigen::Index>(digits[j])];
      break;
    }
  }

  conditional_.resize(static_cast<std::size_t>(N_) + 1);
  conditional_[static_cast<std::size_t>(N_)] = std::move(full);
  for (int k = N_; k >= 1; --k)
    conditional_[static_cast<std::size_t>(k - 1)] = contract_last(conditional_[static_cast<std::size_t>(k)], k, s_, weights_);
}

std::vector<double> CanonicalComponents::component(int k) const {
  if (k < 0 || k > N_) throw Error(ErrorKind::invalid_argument, "component order outside 0..N");
  std::vector<double> t = conditional(k);
  for (int axis = 0; axis < k; ++axis) center_axis(t, s_, axis, weights_);
  return t;
}

std::vector<double> CanonicalComponents::difference(int m) const {
  if (m < 0 || m > N_) throw Error(ErrorKind::invalid_argument, "difference order outside 0..N");
  std::vector<double> t = conditional(N_);
  for (int axis = 0; axis < m; ++axis) center_axis(t, s_, axis, weights_);
  return t;
}

double CanonicalComponents::expectation(std::span<const double> table, int k) const {
  std::vector<double> t(table.begin(), table.end());
  for (int j = k; j >= 1; --j) t = contract_last(t, j, s_, weights_);
  return t.at(0);
}

double CanonicalComponents::total_variance() const {
  std::vector<double> t = conditional(N_);
  const double m = mean();
  for (double& v : t) v = (v - m) * (v - m);
  return expectation(t, N_);
}

double CanonicalComponents::component_variance(int k) const {
  if (k == 0) return 0.0;
  std::vector<double> t = component(k);
  for (double& v : t) v *= v;
  return expectation(t, k);
}

std::size_t CanonicalComponents::index_of(double point) const {
  for (std::size_t i = 0; i < s_; ++i)
    if (points_[static_cast<Eigen::Index>(i)] == point) return i;
  throw Error(ErrorKind::invalid_argument, "kernel argument is not a support point");
}

SymmetricKernel CanonicalComponents::kernel(int k, double scale) const {
  if (k < 1) throw Error(ErrorKind::invalid_argument, "kernel order must be positive");
  auto table = std::make_shared<std::vector<double>>(component(k));
  for (double& v : *table) v *= scale;
  const Eigen::VectorXd pts = points_;
  const std::size_t s = s_;
  auto lookup = [table, pts, s, k](std::span<const double> x) {
    if (static_cast<int>(x.size()) != k) throw Error(ErrorKind::invalid_argument, "kernel arity mismatch");
    std::size_t flat = 0, stride = 1;
    for (int j = 0; j < k; ++j) {
      std::size_t idx = s;
      for (std::size_t i = 0; i < s; ++i)
        if (pts[static_cast<Eigen::Index>(i)] == x[j]) idx = i;
      if (idx == s) throw Error(ErrorKind::invalid_argument, "kernel argument is not a support point");
      flat += idx * stride;
      stride *= s;
    }
    return (*table)[flat];
  };
  return SymmetricKernel(k, lookup, true);
}

SymmetricKernel canonical_component(const SymmetricStatistic& T, const Distribution& dist, int order) {
  if (order < 1 || order > T.size()) throw Error(ErrorKind::invalid_argument, "component order outside 1..N");
  return CanonicalComponents(T, dist).kernel(order);
}

HoeffdingDecomposition decompose(const SymmetricStatistic& T, const Distribution& dist) {
  const CanonicalComponents cc(T, dist);
  const int N = T.size();
  const double n = N;
  const auto s = static_cast<Eigen::Index>(cc.support_size());

  HoeffdingDecomposition dec;
  dec.N = N;
  dec.mean = cc.mean();
  dec.variance = cc.total_variance();
  dec.component_variance.assign(static_cast<std::size_t>(N) + 1, 0.0);
  for (int k = 1; k <= N; ++k) dec.component_variance[static_cast<std::size_t>(k)] = cc.component_variance(k);

  KernelTables tables;
  tables.points = cc.points();
  tables.weights = cc.weights();
  const std::vector<double> t1 = cc.component(1);
  tables.g = std::sqrt(n) * Eigen::Map<const Eigen::VectorXd>(t1.data(), s);
  dec.g = cc.kernel(1, std::sqrt(n));
  if (N >= 2) {
    const std::vector<double> t2 = cc.component(2);
    tables.psi = std::pow(n, 1.5) * Eigen::Map<const Eigen::MatrixXd>(t2.data(), s, s);
    dec.psi = cc.kernel(2, std::pow(n, 1.5));
  } else {
    tables.psi = Eigen::MatrixXd::Zero(s, s);
    dec.psi = SymmetricKernel::zero(2);
  }
  if (N >= 3) {
    const std::vector<double> t3 = cc.component(3);
    const double scale = std::pow(n, 2.5);
    for (Eigen::Index i = 0; i < s; ++i) {
      Eigen::MatrixXd slice(s, s);
      for (Eigen::Index j = 0; j < s; ++j)
        for (Eigen::Index k = 0; k < s; ++k) slice(j, k) = scale * t3[static_cast<std::size_t>(i + s * j + s * s * k)];
      tables.chi.push_back(std::move(slice));
    }
    dec.chi = cc.kernel(3, scale);
  } else {
    dec.chi = SymmetricKernel::zero(3);
  }
  dec.tables = std::move(tables);
  dec.source = TableSource::support;
  return dec;
}

HoeffdingDecomposition decompose_quadratic(const SymmetricStatistic& T, const Distribution& dist,
                                           const QuadratureOptions& options) {
  if (!T.quadratic_form())
    throw Error(ErrorKind::invalid_argument, "statistic '" + T.description() + "' has no quadratic form");
  const QuadraticForm& form = *T.quadratic_form();

  QuadratureOptions opts = options;
  opts.breakpoints.insert(opts.breakpoints.end(), form.breakpoints.begin(), form.breakpoints.end());
  const Distribution measure = dist.quadrature_measure(opts);
  const Eigen::VectorXd pts = measure.points();
  const Eigen::VectorXd w = measure.probabilities();
  const Eigen::Index s = pts.size();
  const int N = T.size();
  const double n = N;

  Eigen::VectorXd u(s);
  Eigen::MatrixXd V(s, s);
  for (Eigen::Index i = 0; i < s; ++i) {
    u[i] = form.linear(pts[i]);
    for (Eigen::Index j = 0; j <= i; ++j) V(i, j) = V(j, i) = form.pairwise(pts[i], pts[j]);
  }
  const Eigen::VectorXd v1 = V * w;
  const double mean_u = w.dot(u);
  const double mean_v = w.dot(v1);

  const Eigen::VectorXd t1 = (u.array() - mean_u + (n - 1.0) * (v1.array() - mean_v)).matrix();
  Eigen::MatrixXd t2 = V;
  t2.colwise() -= v1;
  t2.rowwise() -= v1.transpose();
  t2.array() += mean_v;

  HoeffdingDecomposition dec;
  dec.N = N;
  dec.component_variance.assign(static_cast<std::size_t>(N) + 1, 0.0);
  dec.component_variance[1] = w.dot(t1.cwiseProduct(t1));
  const double pairs = binomial(N, 2);
  if (N >= 2) dec.component_variance[2] = w.dot(t2.cwiseProduct(t2) * w);
  dec.mean = n * mean_u + pairs * mean_v;
  dec.variance = n * dec.component_variance[1] + (N >= 2 ? pairs * dec.component_variance[2] : 0.0);

  KernelTables tables;
  tables.points = pts;
  tables.weights = w;
  tables.g = std::sqrt(n) * t1;
  tables.psi = N >= 2 ? Eigen::MatrixXd(std::pow(n, 1.5) * t2) : Eigen::MatrixXd::Zero(s, s);
  dec.tables = std::move(tables);

  struct Projection {
    QuadraticForm form;
    Eigen::VectorXd pts, w;
    double mean_u, mean_v, n;
    double v1(double x) const {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < pts.size(); ++j) acc += w[j] * form.pairwise(x, pts[j]);
      return acc;
    }
  };
  auto proj = std::make_shared<const Projection>(Projection{form, pts, w, mean_u, mean_v, n});
  dec.g = SymmetricKernel(
      1,
      [proj](std::span<const double> x) {
        const double n = proj->n;
        return std::sqrt(n) * (proj->form.linear(x[0]) - proj->mean_u + (n - 1.0) * (proj->v1(x[0]) - proj->mean_v));
      },
      true);
  if (N >= 2) {
    dec.psi = SymmetricKernel(
        2,
        [proj](std::span<const double> x) {
          return std::pow(proj->n, 1.5) *
                 (proj->form.pairwise(x[0], x[1]) - proj->v1(x[0]) - proj->v1(x[1]) + proj->mean_v);
        },
        true);
  } else {
    dec.psi = SymmetricKernel::zero(2);
  }
  dec.chi = SymmetricKernel::zero(3);
  dec.source = dist.is_finite() ? TableSource::support : TableSource::quadrature;
  return dec;
}

Estimate difference_op(const SymmetricStatistic& T, const Distribution& dist, std::span<const int> indices,
                       std::span<const double> x, const ExpectMode& mode) {
  const int N = T.size();
  if (static_cast<int>(x.size()) != N) throw Error(ErrorKind::invalid_argument, "observation vector must have N entries");
  std::vector<int> idx(indices.begin(), indices.end());
  for (int i : idx)
    if (i < 0 || i >= N) throw Error(ErrorKind::invalid_argument, "difference index outside 0..N-1");
  std::vector<int> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(ErrorKind::invalid_argument, "difference indices must be distinct");

  const int m = static_cast<int>(idx.size());
  std::vector<double> y(x.begin(), x.end());

  if (mode.is_exact()) {
    const auto& support = dist.support();
    const std::size_t s = support.size();
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      std::vector<int> free;
      for (int j = 0; j < m; ++j)
        if (mask & (1u << j)) free.push_back(idx[static_cast<std::size_t>(j)]);
      // E_S T(x): integrate the coordinates in S over the support.
      double cond = 0.0;
      std::vector<std::size_t> digits(free.size(), 0);
      for (;;) {
        double weight = 1.0;
        for (std::size_t j = 0; j < free.size(); ++j) {
          y[static_cast<std::size_t>(free[j])] = support[digits[j]].point;
          weight *= support[digits[j]].prob;
        }
        cond += weight * T(y);
        std::size_t j = 0;
        while (j < digits.size() && ++digits[j] == s) digits[j++] = 0;
        if (j == digits.size()) break;
      }
      for (int i : free) y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
      total += (std::popcount(mask) % 2 ? -1.0 : 1.0) * cond;
    }
    return {total, 0.0};
  }

  if (mode.reps < 2) throw Error(ErrorKind::invalid_argument, "Monte Carlo mode needs reps >= 2");
  Rng rng = make_stream(mode.seed, 0);
  std::vector<double> fresh(static_cast<std::size_t>(m));
  double mean = 0.0, m2 = 0.0;
  for (std::size_t r = 0; r < mode.reps; ++r) {
    dist.draw(rng, fresh);
    double val = 0.0;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      for (int j = 0; j < m; ++j) {
        const auto at = static_cast<std::size_t>(idx[static_cast<std::size_t>(j)]);
        y[at] = (mask & (1u << j)) ? fresh[static_cast<std::size_t>(j)] : x[at];
      }
      val += (std::popcount(mask) % 2 ? -1.0 : 1.0) * T(y);
    }
    const double delta = val - mean;
    mean += delta / static_cast<double>(r + 1);
    m2 += delta * (val - mean);
  }
  return {mean, std::sqrt(m2 / static_cast<double>(mode.reps - 1) / static_cast<double>(mode.reps))};
}

DifferenceMoments delta_moments(const SymmetricStatistic& T, const Distribution& dist, const ExpectMode& mode) {
  const int N = T.size();
  const double n = N;
  DifferenceMoments out;
  out.exact = mode.is_exact();

  if (mode.is_exact()) {
    const CanonicalComponents cc(T, dist);
    for (int m = 1; m <= std::min(4, N); ++m) {
      std::vector<double> d = cc.difference(m);
      for (double& v : d) v *= v;
      out.delta_sq[static_cast<std::size_t>(m - 1)] = {std::pow(n, 2 * m - 1) * cc.expectation(d, N), 0.0};
    }
    return out;
  }

  if (mode.reps < 2) throw Error(ErrorKind::invalid_argument, "Monte Carlo mode needs reps >= 2");
  std::vector<double> x(static_cast<std::size_t>(N)), y(static_cast<std::size_t>(N));
  for (int m = 1; m <= std::min(4, N); ++m) {
    Rng rng = make_stream(mode.seed, static_cast<std::uint64_t>(m));
    std::vector<double> fresh(static_cast<std::size_t>(m));
    const double scale = std::pow(n, 2 * m - 1) / static_cast<double>(1u << m);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t r = 0; r < mode.reps; ++r) {
      dist.draw(rng, x);
      dist.draw(rng, fresh);
      double alt = 0.0;
      for (unsigned mask = 0; mask < (1u << m); ++mask) {
        y = x;
        for (int j = 0; j < m; ++j)
          if (mask & (1u << j)) y[static_cast<std::size_t>(j)] = fresh[static_cast<std::size_t>(j)];
        alt += (std::popcount(mask) % 2 ? -1.0 : 1.0) * T(y);
      }
      const double val = scale * alt * alt;
      const double delta = val - mean;
      mean += delta / static_cast<double>(r + 1);
      m2 += delta * (val - mean);
    }
    out.delta_sq[static_cast<std::size_t>(m - 1)] = {
        mean, std::sqrt(m2 / static_cast<double>(mode.reps - 1) / static_cast<double>(mode.reps))};
  }
  return out;
}

double delta_moment_from_components(const HoeffdingDecomposition& dec, int m) {
  const int N = dec.N;
  if (m > N) return 0.0;
  double total = 0.0;
  for (int k = m; k <= N; ++k) total += dec.component_variance.at(static_cast<std::size_t>(k)) * binomial(N - m, k - m);
  return std::pow(static_cast<double>(N), 2 * m - 1) * total;
}

bool MomentIdentityReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.pass; });
}

MomentIdentityReport verify_moment_identities(const SymmetricStatistic& T, const Distribution& dist) {
  constexpr double kIdentityTol = 1e-9;
  constexpr double kSignSlack = 1e-12;
  const CanonicalComponents cc(T, dist);
  const int N = T.size();
  const double n = N;
  const std::size_t s = cc.support_size();
  const std::size_t total = cc.conditional(N).size();

  std::vector<double> sigma(static_cast<std::size_t>(N) + 1, 0.0);
  for (int k = 1; k <= N; ++k) sigma[static_cast<std::size_t>(k)] = cc.component_variance(k);

  MomentIdentityReport report;
  auto identity = [&](std::string name, int m, double lhs, double rhs) {
    report.checks.push_back({std::move(name), m, lhs, rhs, true, close(lhs, rhs, kIdentityTol)});
  };
  auto bound = [&](std::string name, int m, double lhs, double rhs) {
    report.checks.push_back({std::move(name), m, lhs, rhs, false, lhs <= rhs + kSignSlack * std::max(1.0, std::abs(rhs))});
  };

  double var_sum = 0.0;
  for (int k = 1; k <= N; ++k) var_sum += binomial(N, k) * sigma[static_cast<std::size_t>(k)];
  identity("variance_identity", 0, cc.total_variance(), var_sum);

  std::array<double, 6> delta{};
  for (int m = 1; m <= std::min(4, N); ++m) {
    std::vector<double> d = cc.difference(m);
    for (double& v : d) v *= v;
    delta[static_cast<std::size_t>(m)] = std::pow(n, 2 * m - 1) * cc.expectation(d, N);
    double from_components = 0.0;
    for (int k = m; k <= N; ++k) from_components += sigma[static_cast<std::size_t>(k)] * binomial(N - m, k - m);
    identity("delta_component_identity", m, delta[static_cast<std::size_t>(m)],
             std::pow(n, 2 * m - 1) * from_components);
  }

  // R_m = T - E T - U_1 - ... - U_{m-1}, built pointwise from the component tables.
  std::vector<double> remainder = cc.conditional(N);
  for (double& v : remainder) v -= cc.mean();
  for (int m = 1; m <= std::min(4, N); ++m) {
    if (m > 1) {
      const int j = m - 1;
      const std::vector<double> comp = cc.component(j);
      std::vector<std::size_t> digits(static_cast<std::size_t>(N), 0);
      for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t r = flat;
        for (int c = 0; c < N; ++c) {
          digits[static_cast<std::size_t>(c)] = r % s;
          r /= s;
        }
        double u = 0.0;
        for (unsigned mask = 0; mask < (1u << N); ++mask) {
          if (std::popcount(mask) != j) continue;
          std::size_t sub = 0, stride = 1;
          for (int c = 0; c < N; ++c)
            if (mask & (1u << c)) {
              sub += digits[static_cast<std::size_t>(c)] * stride;
              stride *= s;
            }
          u += comp[sub];
        }
        remainder[flat] -= u;
      }
    }
    std::vector<double> sq = remainder;
    for (double& v : sq) v *= v;
    const double er2 = cc.expectation(sq, N);
    double tail = 0.0;
    for (int k = m; k <= N; ++k) tail += binomial(N, k) * sigma[static_cast<std::size_t>(k)];
    identity("remainder_identity", m, er2, tail);
    bound("remainder_bound", m, er2, std::pow(n, -(m - 1)) * delta[static_cast<std::size_t>(m)]);
  }

  for (int m = 1; m <= std::min(3, N); ++m) {
    const double next = m + 1 <= N ? delta[static_cast<std::size_t>(m + 1)] : 0.0;
    bound("delta_recursion_bound", m, delta[static_cast<std::size_t>(m)],
          std::pow(n, 2 * m - 1) * sigma[static_cast<std::size_t>(m)] + next / n);
  }
  return report;
}

}  // namespace symstat
