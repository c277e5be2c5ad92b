#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace symstat {

/// Vectors in R^d (d = 1 for the line) and the minimum-norm threshold r.
struct SignedSumInstance {
  std::vector<Eigen::VectorXd> vectors;
  double r = 1.0;

  int dimension() const { return vectors.empty() ? 1 : static_cast<int>(vectors.front().size()); }
  int size() const { return static_cast<int>(vectors.size()); }
};

/// Relative slack on distance comparisons; it only ever shrinks balls, so
/// counts cannot exceed the true value.
inline constexpr double kDistanceSlack = 1e-12;
inline constexpr int kMaxBallVectors = 24;
inline constexpr int kMaxPartitionVectors = 20;

/// Throws unless all vectors share one dimension and have norm >= r.
void validate(const SignedSumInstance& inst);

/// x_A = sum_{i in A} x_i - sum_{i not in A} x_i for every subset mask A.
std::vector<Eigen::VectorXd> signed_sums(const SignedSumInstance& inst);

struct BallCount {
  std::uint64_t count = 0;
  Eigen::VectorXd center;
  bool exact = false;  // true on the line; a certified lower bound otherwise
};

/// Largest number of signed sums inside one open ball of radius r. On the
/// line this is an exact sliding window; in higher dimension the centres
/// searched are the sums and midpoints of close pairs.
BallCount max_ball_count(const SignedSumInstance& inst);

/// C(n, floor(n/2)).
std::uint64_t kleitman_bound(int n);

struct SymmetricPartition {
  std::vector<std::vector<std::uint32_t>> classes;  // subset masks
  bool covering = false;  // disjoint, nonempty, and every mask used once
  bool sparse = false;    // within-class sums at distance >= 2r (1 - slack)
  double min_within_distance = 0.0;
};

/// Kleitman's inductive construction: each class splits by the new vector
/// into one class that grows by one and one that shrinks by one. Certified by
/// an exhaustive within-class pair check.
SymmetricPartition symmetric_partition(const SignedSumInstance& inst);

}  // namespace symstat
