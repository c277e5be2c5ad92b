#pragma once

#include <Eigen/Core>
#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symstat/model.hpp"

namespace symstat {

/// Largest s^N tensor the exact decomposition will materialise (4^12).
inline constexpr double kTableBudget = 16777216.0;

/// Kernels of a decomposition tabulated on a finite measure.
struct KernelTables {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
  Eigen::VectorXd g;
  Eigen::MatrixXd psi;
  std::vector<Eigen::MatrixXd> chi;  // chi[i](j, k); empty when the cubic part vanishes
};

/// Where the tables live: on the law's own support (exact) or on a quadrature
/// measure standing in for a continuous law.
enum class TableSource { support, quadrature, none };

/// T - ET = L + Q + K + R with g_1 = N^{-1/2} g, g_2 = N^{-3/2} psi,
/// g_3 = N^{-5/2} chi.
struct HoeffdingDecomposition {
  int N = 0;
  double mean = 0.0;
  double variance = 0.0;                  // sigma_T^2
  SymmetricKernel g, psi, chi;
  std::vector<double> component_variance;  // sigma_k^2 at index k, k = 0..N (index 0 is 0)
  std::optional<KernelTables> tables;
  TableSource source = TableSource::none;

  /// sigma^2 = E g^2(X_1) = N sigma_1^2.
  double sigma2() const { return N * component_variance.at(1); }
};

/// Canonical components T_{Omega_k}, k = 0..N, of a statistic on a finite law.
/// Tables are flat s^k arrays; coordinate j has stride s^j.
class CanonicalComponents {
 public:
  CanonicalComponents(const SymmetricStatistic& T, const Distribution& dist);

  int size() const { return N_; }
  std::size_t support_size() const { return s_; }
  const Eigen::VectorXd& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  /// E(T | X_1..X_k) as an s^k table; k = N is the statistic itself.
  const std::vector<double>& conditional(int k) const { return conditional_.at(static_cast<std::size_t>(k)); }

  /// T_{Omega_k} as an s^k table.
  std::vector<double> component(int k) const;

  /// (D_1 ... D_m T) over the full s^N table.
  std::vector<double> difference(int m) const;

  double mean() const { return conditional_[0][0]; }
  double total_variance() const;
  double component_variance(int k) const;

  /// Expectation of an s^k table under the product measure.
  double expectation(std::span<const double> table, int k) const;

  std::size_t index_of(double point) const;

  /// Arity-k kernel that looks up `scale * component(k)`; arguments must be support points.
  SymmetricKernel kernel(int k, double scale = 1.0) const;

 private:
  int N_;
  std::size_t s_;
  Eigen::VectorXd points_, weights_;
  std::vector<std::vector<double>> conditional_;
};

/// T_A for |A| = order (by exchangeability it depends only on |A|).
SymmetricKernel canonical_component(const SymmetricStatistic& T, const Distribution& dist, int order);

/// Exact decomposition on a finite law by subset Moebius inversion.
HoeffdingDecomposition decompose(const SymmetricStatistic& T, const Distribution& dist);

/// Decomposition of a statistic with a QuadraticForm. Finite laws are exact;
/// continuous laws are tabulated on their quadrature measure, and the returned
/// kernels evaluate anywhere by summing over that measure.
HoeffdingDecomposition decompose_quadratic(const SymmetricStatistic& T, const Distribution& dist,
                                           const QuadratureOptions& options = {});

/// (D_{i1} ... D_{im} T)(x) = sum_{S subset of indices} (-1)^{|S|} E_S T(x).
/// Indices are zero-based and must be distinct.
Estimate difference_op(const SymmetricStatistic& T, const Distribution& dist, std::span<const int> indices,
                       std::span<const double> x, const ExpectMode& mode);

struct DifferenceMoments {
  std::array<Estimate, 4> delta_sq{};  // Delta_m^2 at index m - 1
  bool exact = true;

  const Estimate& operator[](int m) const { return delta_sq.at(static_cast<std::size_t>(m - 1)); }
};

/// Delta_m^2 = E |N^{m-1/2} D_1 ... D_m T|^2 for m = 1..4 (zero when m > N).
/// Exact mode uses the full table; MC mode uses independent copies of the
/// first m coordinates (E of the squared 2^m-point alternating sum is 2^m Delta).
DifferenceMoments delta_moments(const SymmetricStatistic& T, const Distribution& dist, const ExpectMode& mode);

/// Delta_m^2 from component variances: N^{2m-1} sum_k sigma_k^2 C(N-m, k-m).
double delta_moment_from_components(const HoeffdingDecomposition& dec, int m);

struct IdentityCheck {
  std::string name;
  int m = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool identity = false;  // equality at tolerance, otherwise lhs <= rhs
  bool pass = false;
};

struct MomentIdentityReport {
  std::vector<IdentityCheck> checks;
  bool all_pass() const;
};

/// Variance identity, remainder bound E R_m^2 <= N^{-(m-1)} Delta_m^2 and
/// Delta_m^2 <= N^{2m-1} sigma_m^2 + N^{-1} Delta_{m+1}^2, each side computed
/// by an independent route on the exact tables.
MomentIdentityReport verify_moment_identities(const SymmetricStatistic& T, const Distribution& dist);

}  // namespace symstat
