#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "symstat/rng.hpp"

namespace symstat {

/// A real-valued function of a fixed number of real arguments.
using RealFn = std::function<double(std::span<const double>)>;

/// Value with its Monte Carlo standard error (zero for exact results).
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct Atom {
  double point;
  double prob;
};

enum class Law { finite, normal, uniform, rademacher };

/// Composite Gauss–Legendre settings used when a continuous law is replaced by
/// a finite quadrature measure.
struct QuadratureOptions {
  int panels = 256;
  int order = 8;
  double normal_halfwidth = 10.0;  // in standard deviations
  std::vector<double> breakpoints;
};

struct MomentsHint {
  double mean;
  double variance;
};

/// Observation law: either a finite support (exact expectations) or a named
/// sampler (Monte Carlo expectations). Immutable once built.
class Distribution {
 public:
  static Distribution finite(std::vector<Atom> support, std::uint64_t seed = 0);
  static Distribution normal(double mean = 0.0, double sd = 1.0, std::uint64_t seed = 0);
  static Distribution uniform(double lo, double hi, std::uint64_t seed = 0);
  static Distribution rademacher(std::uint64_t seed = 0);

  Law law() const { return law_; }
  /// True when the support is enumerable: finite laws and Rademacher.
  bool is_finite() const { return law_ == Law::finite || law_ == Law::rademacher; }
  std::size_t support_size() const;
  const std::vector<Atom>& support() const;
  Eigen::VectorXd points() const;
  Eigen::VectorXd probabilities() const;

  std::uint64_t seed() const { return seed_; }
  Distribution with_seed(std::uint64_t seed) const;
  const std::optional<MomentsHint>& moments_hint() const { return hint_; }
  std::pair<double, double> parameters() const { return {a_, b_}; }

  Rng stream(std::uint64_t stream_id) const { return make_stream(seed_, stream_id); }
  double draw(Rng& rng) const;
  void draw(Rng& rng, std::span<double> out) const;

  /// Finite measure carrying the expectations of this law: the support itself
  /// for finite laws, the two atoms for Rademacher, and a normalised composite
  /// Gauss–Legendre rule for normal and uniform laws.
  Distribution quadrature_measure(const QuadratureOptions& options = {}) const;

  std::string describe() const;

 private:
  Distribution() = default;

  Law law_ = Law::finite;
  std::vector<Atom> support_;
  std::vector<double> cumulative_;
  double a_ = 0.0;
  double b_ = 0.0;
  std::uint64_t seed_ = 0;
  std::optional<MomentsHint> hint_;
};

/// How an expectation is evaluated.
struct ExpectMode {
  enum class Kind { exact, mc };
  Kind kind = Kind::exact;
  std::size_t reps = 0;
  std::uint64_t seed = 0;

  static ExpectMode exact() { return {}; }
  static ExpectMode mc(std::size_t reps, std::uint64_t seed) { return {Kind::mc, reps, seed}; }
  bool is_exact() const { return kind == Kind::exact; }
};

/// Product-measure enumeration limit for exact expectations.
inline constexpr double kEnumerationBudget = 1e8;

/// E f(X_1, ..., X_m) for i.i.d. X_i ~ dist.
Estimate expect(const Distribution& dist, const RealFn& f, int m, const ExpectMode& mode);

class SymmetricKernel {
 public:
  SymmetricKernel() = default;
  SymmetricKernel(int arity, RealFn fn, bool symmetry_certified = false);

  static SymmetricKernel zero(int arity);

  int arity() const { return arity_; }
  bool symmetry_certified() const { return certified_; }
  explicit operator bool() const { return static_cast<bool>(fn_); }

  double operator()(std::span<const double> x) const { return fn_(x); }
  double operator()(double x) const;
  double operator()(double x, double y) const;
  double operator()(double x, double y, double z) const;

 private:
  int arity_ = 0;
  RealFn fn_;
  bool certified_ = false;
};

/// Kernels by name: abs_diff, product, sum, product_plus_sum, square_diff, constant.
SymmetricKernel named_kernel(std::string_view name);

/// T = sum_i linear(X_i) + sum_{i<j} pairwise(X_i, X_j). Statistics with this
/// structure admit a Hoeffding decomposition on continuous laws.
struct QuadraticForm {
  std::function<double(double)> linear;
  std::function<double(double, double)> pairwise;
  std::vector<double> breakpoints;  // jumps of linear/pairwise in either argument
};

class SymmetricStatistic {
 public:
  SymmetricStatistic(int size, RealFn fn, std::string description,
                     std::optional<QuadraticForm> quadratic = std::nullopt);

  int size() const { return size_; }
  const std::string& description() const { return description_; }
  const std::optional<QuadraticForm>& quadratic_form() const { return quadratic_; }

  double operator()(std::span<const double> x) const { return fn_(x); }

 private:
  int size_;
  RealFn fn_;
  std::string description_;
  std::optional<QuadraticForm> quadratic_;
};

/// U = (sqrt(N)/2) * C(N,2)^{-1} * sum_{i<j} h(X_i, X_j).
SymmetricStatistic u_statistic(const SymmetricKernel& h, int N);

/// Gini mean difference with the U-statistic normalisation above, evaluated
/// in O(N log N) by sorting.
SymmetricStatistic gini_statistic(int N);

/// T = sum_i f(X_i).
SymmetricStatistic linear_statistic(std::function<double(double)> f, int N, std::string description);

/// (1/N) sum_i X_i.
SymmetricStatistic sample_mean(int N);

/// Nearest integer with ties to even.
double nearest_integer(double x);

/// T_N = (W_N + N^{-1/2} V_N)(1 - N^{-1/2} V_N) with
/// W_N = N^{-1} sum [sqrt(N) X_j] and V_N = N^{-1/2} sum {sqrt(N) X_j}.
SymmetricStatistic example1_statistic(int N);

}  // namespace symstat
