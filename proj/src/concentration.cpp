#include "symstat/concentration.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "symstat/combinatorics.hpp"
#include "symstat/error.hpp"

namespace symstat {

void validate(const SignedSumInstance& inst) {
  if (!(inst.r > 0.0)) throw Error(ErrorKind::invalid_argument, "r must be positive");
  const auto d = inst.vectors.empty() ? 0 : inst.vectors.front().size();
  for (const auto& v : inst.vectors) {
    if (v.size() != d || d == 0) throw Error(ErrorKind::invalid_argument, "vectors must share a positive dimension");
    if (v.norm() < inst.r * (1.0 - kDistanceSlack)) throw Error(ErrorKind::invalid_argument, "every vector needs norm >= r");
  }
}

std::vector<Eigen::VectorXd> signed_sums(const SignedSumInstance& inst) {
  const int n = inst.size();
  const Eigen::Index d = inst.dimension();
  Eigen::VectorXd total = Eigen::VectorXd::Zero(d);
  for (const auto& v : inst.vectors) total += v;
  // x_A = 2 s(A) - total, with s(A) built incrementally from the lowest set bit.
  std::vector<Eigen::VectorXd> partial(std::size_t{1} << n, Eigen::VectorXd::Zero(d));
  for (std::size_t mask = 1; mask < partial.size(); ++mask) {
    const int low = std::countr_zero(mask);
    partial[mask] = partial[mask & (mask - 1)] + inst.vectors[static_cast<std::size_t>(low)];
  }
  for (auto& p : partial) p = 2.0 * p - total;
  return partial;
}

std::uint64_t kleitman_bound(int n) {
  if (n < 0) throw Error(ErrorKind::invalid_argument, "n must be non-negative");
  return binomial_exact(n, n / 2);
}

namespace {

// Grid with cells of side 2r: every point within 2r of a query lies in the
// 3^d surrounding cells. Cells are keyed by an exact mixed-radix index over the
// bounding box (padded by one cell), so distinct cells never share a bucket.
class CellGrid {
 public:
  CellGrid(const std::vector<Eigen::VectorXd>& pts, double cell) : cell_(cell) {
    const auto d = static_cast<std::size_t>(pts.front().size());
    lo_.assign(d, std::numeric_limits<long long>::max());
    std::vector<long long> hi(d, std::numeric_limits<long long>::min());
    for (const auto& p : pts)
      for (std::size_t i = 0; i < d; ++i) {
        const long long c = coord(p, i);
        lo_[i] = std::min(lo_[i], c - 1);
        hi[i] = std::max(hi[i], c + 1);
      }
    stride_.assign(d, 1);
    double cells = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      extent_.push_back(hi[i] - lo_[i] + 1);
      cells *= static_cast<double>(extent_[i]);
      if (i + 1 < d) stride_[i + 1] = stride_[i] * static_cast<std::uint64_t>(extent_[i]);
    }
    if (cells > 1e18) throw Error(ErrorKind::budget, "signed sums spread over too many cells");
    offsets_.push_back(0);
    for (std::size_t i = 0; i < d; ++i) {
      std::vector<long long> next;
      for (long long o : offsets_)
        for (long long step : {-1LL, 0LL, 1LL}) next.push_back(o + step * static_cast<long long>(stride_[i]));
      offsets_ = std::move(next);
    }
    for (std::size_t i = 0; i < pts.size(); ++i) cells_[key(pts[i])].push_back(i);
  }

  template <class Fn>
  void near(const Eigen::VectorXd& q, Fn&& fn) const {
    const auto base = static_cast<long long>(key(q));
    for (long long o : offsets_) {
      auto it = cells_.find(static_cast<std::uint64_t>(base + o));
      if (it == cells_.end()) continue;
      for (std::size_t idx : it->second) fn(idx);
    }
  }

 private:
  long long coord(const Eigen::VectorXd& p, std::size_t i) const {
    return static_cast<long long>(std::floor(p[static_cast<Eigen::Index>(i)] / cell_));
  }
  // Queries are sums or midpoints of sums, so they stay inside the padded box.
  std::uint64_t key(const Eigen::VectorXd& p) const {
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < lo_.size(); ++i) {
      const long long c = std::clamp(coord(p, i), lo_[i] + 1, lo_[i] + extent_[i] - 2);
      k += static_cast<std::uint64_t>(c - lo_[i]) * stride_[i];
    }
    return k;
  }

  double cell_;
  std::vector<long long> lo_, extent_, offsets_;
  std::vector<std::uint64_t> stride_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

// Below this many sums every close pair contributes a midpoint; above it only
// each sum's nearest close neighbours do.
constexpr std::size_t kAllPairsLimit = 1024;
constexpr std::size_t kNearestNeighbours = 16;

}  // namespace

BallCount max_ball_count(const SignedSumInstance& inst) {
  validate(inst);
  if (inst.size() > kMaxBallVectors) throw Error(ErrorKind::budget, "max_ball_count needs n <= 24");
  const std::vector<Eigen::VectorXd> sums = signed_sums(inst);
  const double r = inst.r * (1.0 - kDistanceSlack);
  BallCount best;

  if (inst.dimension() == 1) {
    std::vector<double> line(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) line[i] = sums[i][0];
    std::sort(line.begin(), line.end());
    std::size_t j = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
      j = std::max(j, i);
      while (j + 1 < line.size() && line[j + 1] - line[i] < 2.0 * r) ++j;
      if (j - i + 1 > best.count) {
        best.count = j - i + 1;
        best.center = Eigen::VectorXd::Constant(1, 0.5 * (line[i] + line[j]));
      }
    }
    best.exact = true;
    return best;
  }

  // Merge coincident sums so each candidate centre is counted once.
  std::map<std::vector<double>, std::uint64_t> merged;
  for (const auto& s : sums) ++merged[std::vector<double>(s.data(), s.data() + s.size())];
  std::vector<Eigen::VectorXd> pts;
  std::vector<std::uint64_t> mult;
  for (const auto& [p, m] : merged) {
    pts.push_back(Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())));
    mult.push_back(m);
  }
  const CellGrid grid(pts, 2.0 * inst.r);
  const double r2 = r * r;

  auto count_at = [&](const Eigen::VectorXd& c) {
    std::uint64_t k = 0;
    grid.near(c, [&](std::size_t idx) {
      if ((pts[idx] - c).squaredNorm() < r2) k += mult[idx];
    });
    if (k > best.count) {
      best.count = k;
      best.center = c;
    }
  };

  const bool all_pairs = pts.size() <= kAllPairsLimit;
  std::vector<std::pair<double, std::size_t>> close;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    count_at(pts[i]);
    close.clear();
    grid.near(pts[i], [&](std::size_t j) {
      if (j <= i && all_pairs) return;
      if (j == i) return;
      const double d2 = (pts[j] - pts[i]).squaredNorm();
      if (d2 < 4.0 * r2) close.emplace_back(d2, j);
    });
    if (!all_pairs && close.size() > kNearestNeighbours) {
      std::partial_sort(close.begin(), close.begin() + kNearestNeighbours, close.end());
      close.resize(kNearestNeighbours);
    }
    for (const auto& [d2, j] : close) count_at(0.5 * (pts[i] + pts[j]));
  }
  best.exact = false;
  return best;
}

SymmetricPartition symmetric_partition(const SignedSumInstance& inst) {
  validate(inst);
  const int n = inst.size();
  if (n > kMaxPartitionVectors) throw Error(ErrorKind::budget, "symmetric_partition needs n <= 20");
  const Eigen::Index d = inst.dimension();

  SymmetricPartition out;
  out.classes = {{0u}};
  // Signed sums over the first k vectors, indexed by mask.
  std::vector<Eigen::VectorXd> partial{Eigen::VectorXd::Zero(d)};
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd& x = inst.vectors[static_cast<std::size_t>(k)];
    std::vector<std::vector<std::uint32_t>> next;
    next.reserve(out.classes.size() * 2);
    for (const auto& cls : out.classes) {
      std::size_t pick = 0;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < cls.size(); ++i) {
        const double ip = partial[cls[i]].dot(x);
        if (ip > best) {
          best = ip;
          pick = i;
        }
      }
      const std::uint32_t bit = 1u << k;
      std::vector<std::uint32_t> grow = cls;
      grow.push_back(cls[pick] | bit);
      std::vector<std::uint32_t> shrink;
      for (std::size_t i = 0; i < cls.size(); ++i)
        if (i != pick) shrink.push_back(cls[i] | bit);
      next.push_back(std::move(grow));
      if (!shrink.empty()) next.push_back(std::move(shrink));
    }
    out.classes = std::move(next);
    std::vector<Eigen::VectorXd> extended(partial.size() * 2);
    for (std::size_t m = 0; m < partial.size(); ++m) {
      extended[m] = partial[m] - x;
      extended[m | (std::size_t{1} << k)] = partial[m] + x;
    }
    partial = std::move(extended);
  }

  std::vector<int> seen(std::size_t{1} << n, 0);
  bool nonempty = true;
  for (const auto& cls : out.classes) {
    nonempty = nonempty && !cls.empty();
    for (auto m : cls) ++seen[m];
  }
  out.covering = nonempty && std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });

  const double threshold = 2.0 * inst.r * (1.0 - kDistanceSlack);
  out.min_within_distance = std::numeric_limits<double>::infinity();
  for (const auto& cls : out.classes)
    for (std::size_t i = 0; i < cls.size(); ++i)
      for (std::size_t j = i + 1; j < cls.size(); ++j)
        out.min_within_distance = std::min(out.min_within_distance, (partial[cls[i]] - partial[cls[j]]).norm());
  out.sparse = out.min_within_distance >= threshold;
  return out;
}

}  // namespace symstat
