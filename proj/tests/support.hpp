#pragma once

// Generators and brute-force oracles shared by the unit and acceptance tests.
// Oracles here enumerate product measures directly and never call the
// decomposition code they are used to check.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "symstat/model.hpp"
#include "symstat/rng.hpp"

namespace symstat::testing {

/// Finite law with `s` distinct points in [-2, 2] and weights bounded away from 0.
inline Distribution random_finite_law(Rng& rng, int s) {
  std::vector<Atom> atoms;
  double total = 0.0;
  while (static_cast<int>(atoms.size()) < s) {
    const double x = std::round((4.0 * uniform01(rng) - 2.0) * 1000.0) / 1000.0;
    bool dup = false;
    for (const auto& a : atoms) dup = dup || a.point == x;
    if (dup) continue;
    const double w = 0.2 + uniform01(rng);
    atoms.push_back({x, w});
    total += w;
  }
  for (auto& a : atoms) a.prob /= total;
  return Distribution::finite(std::move(atoms));
}

/// A symmetric statistic with no structure at all: a hash of the sorted
/// argument bits mapped to [-1, 1]. Every Hoeffding component is generically nonzero.
inline SymmetricStatistic random_symmetric_statistic(int N, std::uint64_t salt) {
  auto fn = [salt](std::span<const double> in) {
    std::vector<double> x(in.begin(), in.end());
    std::sort(x.begin(), x.end());
    std::uint64_t h = splitmix64(salt);
    for (double v : x) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v));
    return 2.0 * (static_cast<double>(h >> 11) * 0x1.0p-53) - 1.0;
  };
  return SymmetricStatistic(N, fn, "random_hash");
}

/// Polynomial in the power sums p1, p2, p3 with random coefficients.
inline SymmetricStatistic random_polynomial_statistic(int N, Rng& rng) {
  std::vector<double> c(7);
  for (double& v : c) v = 2.0 * uniform01(rng) - 1.0;
  auto fn = [c](std::span<const double> x) {
    double p1 = 0.0, p2 = 0.0, p3 = 0.0;
    for (double v : x) {
      p1 += v;
      p2 += v * v;
      p3 += v * v * v;
    }
    return c[0] * p1 + c[1] * p2 + c[2] * p1 * p1 + c[3] * p1 * p2 + c[4] * p3 + c[5] * p1 * p1 * p1 +
           c[6] * p2 * p2 / 10.0;
  };
  return SymmetricStatistic(N, fn, "random_polynomial");
}

/// Visits every point of the s^N product grid as an index vector.
template <class F>
void for_each_grid_point(int N, std::size_t s, F&& f) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(N), 0);
  while (true) {
    f(std::span<const std::size_t>(idx));
    std::size_t j = 0;
    while (j < idx.size() && ++idx[j] == s) idx[j++] = 0;
    if (j == idx.size()) return;
  }
}

/// E(T | X_i = x_i for i in `fixed`) by enumerating the free coordinates.
inline double conditional_expectation(const SymmetricStatistic& T, const Distribution& dist,
                                      std::span<const double> x, std::uint32_t fixed) {
  const auto& atoms = dist.support();
  const int N = T.size();
  std::vector<int> free_coords;
  for (int i = 0; i < N; ++i)
    if (!(fixed >> i & 1u)) free_coords.push_back(i);
  std::vector<double> y(x.begin(), x.end());
  double total = 0.0;
  for_each_grid_point(static_cast<int>(free_coords.size()), atoms.size(), [&](std::span<const std::size_t> idx) {
    double w = 1.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      y[static_cast<std::size_t>(free_coords[k])] = atoms[idx[k]].point;
      w *= atoms[idx[k]].prob;
    }
    total += w * T(y);
  });
  return total;
}

/// T_A(x) = sum_{B subset of A} (-1)^{|A|-|B|} E(T | X_B = x_B).
inline double moebius_component(const SymmetricStatistic& T, const Distribution& dist, std::span<const double> x,
                                std::uint32_t A) {
  double total = 0.0;
  for (std::uint32_t B = A;; B = (B - 1) & A) {
    const int sign = (std::popcount(A) - std::popcount(B)) % 2 == 0 ? 1 : -1;
    total += sign * conditional_expectation(T, dist, x, B);
    if (B == 0) break;
  }
  return total;
}

/// Var T by direct enumeration of the product measure.
inline double brute_variance(const SymmetricStatistic& T, const Distribution& dist) {
  const auto& atoms = dist.support();
  std::vector<double> x(static_cast<std::size_t>(T.size()));
  double m1 = 0.0, m2 = 0.0;
  for_each_grid_point(T.size(), atoms.size(), [&](std::span<const std::size_t> idx) {
    double w = 1.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      x[k] = atoms[idx[k]].point;
      w *= atoms[idx[k]].prob;
    }
    const double v = T(x);
    m1 += w * v;
    m2 += w * v * v;
  });
  return m2 - m1 * m1;
}

inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace symstat::testing
