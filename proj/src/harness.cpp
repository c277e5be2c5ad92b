#include "symstat/harness.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "symstat/error.hpp"
#include "symstat/parallel.hpp"

namespace symstat {

void validate(const ExperimentSpec& spec) {
  if (spec.n_list.empty()) throw Error(ErrorKind::invalid_argument, "N list is empty");
  for (std::size_t i = 0; i < spec.n_list.size(); ++i) {
    if (spec.n_list[i] < 1) throw Error(ErrorKind::invalid_size, "sample sizes must be positive");
    if (i > 0 && spec.n_list[i] <= spec.n_list[i - 1])
      throw Error(ErrorKind::invalid_argument, "N list must be strictly increasing");
  }
  if (spec.reps < kMinReps) throw Error(ErrorKind::invalid_argument, "experiments need reps >= 1000");
}

SymmetricStatistic make_family(const std::string& family, int N) {
  if (family == "gini") return gini_statistic(N);
  if (family == "example1") return example1_statistic(N);
  if (family == "linear") {
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    return linear_statistic([scale](double x) { return scale * x; }, N, "linear");
  }
  const std::string prefix = "u_statistic:";
  if (family.rfind(prefix, 0) == 0) return u_statistic(named_kernel(family.substr(prefix.size())), N);
  throw Error(ErrorKind::invalid_argument, "unknown statistic family '" + family + "'");
}

double dkw_floor(std::size_t reps, double alpha) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(reps)));
}

std::vector<double> simulate_values(const SymmetricStatistic& T, const Distribution& dist, std::size_t reps,
                                    std::uint64_t seed, std::uint64_t stream_base, int workers) {
  std::vector<double> out(reps);
  const auto n = static_cast<std::size_t>(T.size());
  for_each_block(block_count(reps), workers, [&](std::size_t block) {
    Rng rng = make_stream(seed, stream_base + block);
    std::vector<double> x(n);
    const std::size_t start = block * kBlockSize;
    for (std::size_t r = 0; r < block_length(reps, block); ++r) {
      dist.draw(rng, x);
      out[start + r] = T(x);
    }
  });
  return out;
}

RateFit rate_fit(std::span<const RatePoint> points) {
  std::vector<double> lx, ly;
  for (const auto& p : points) {
    if (!(p.delta > 2.0 * p.floor) || !(p.N > 0.0)) continue;
    lx.push_back(std::log(p.N));
    ly.push_back(std::log(std::sqrt(p.delta * p.delta - p.floor * p.floor)));
  }
  RateFit fit;
  fit.used = static_cast<int>(lx.size());
  if (lx.size() < 3) {
    fit.message = std::string(to_string(ErrorKind::insufficient_signal)) + ": " + std::to_string(lx.size()) +
                  " points above twice the floor";
    return fit;
  }
  const auto n = static_cast<Eigen::Index>(lx.size());
  Eigen::MatrixXd X(n, 2);
  X.col(0).setOnes();
  X.col(1) = Eigen::Map<const Eigen::VectorXd>(lx.data(), n);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ly.data(), n);
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
  const double rss = (y - X * beta).squaredNorm();
  const Eigen::VectorXd xc = X.col(1).array() - X.col(1).mean();
  fit.ok = true;
  fit.intercept = beta[0];
  fit.slope = beta[1];
  fit.slope_se = n > 2 ? std::sqrt(rss / static_cast<double>(n - 2) / xc.squaredNorm()) : 0.0;
  fit.band = 2.0 * fit.slope_se;
  return fit;
}

ExperimentResult run(const ExperimentSpec& spec) {
  validate(spec);
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.spec = spec;

  for (int N : spec.n_list) {
    const SymmetricStatistic T = make_family(spec.family, N);
    const HoeffdingDecomposition dec =
        T.quadratic_form() ? decompose_quadratic(T, spec.dist, spec.quadrature) : decompose(T, spec.dist);
    CumulantOptions copts;
    copts.workers = spec.workers;
    const CumulantSet cs = cumulants(dec, spec.dist, spec.cumulant_mode, copts);

    const std::uint64_t base = static_cast<std::uint64_t>(N) << 32;
    double mean = dec.mean, var = dec.variance;
    if (spec.sigma_source == SigmaSource::mc_oracle) {
      // Independent of the experiment's own replications: separate streams.
      const std::vector<double> oracle =
          simulate_values(T, spec.dist, 10 * spec.reps, spec.seed, base | (std::uint64_t{1} << 62), spec.workers);
      mean = std::accumulate(oracle.begin(), oracle.end(), 0.0) / static_cast<double>(oracle.size());
      double ss = 0.0;
      for (double v : oracle) ss += (v - mean) * (v - mean);
      var = ss / static_cast<double>(oracle.size() - 1);
    }

    std::vector<double> values = simulate_values(T, spec.dist, spec.reps, spec.seed, base, spec.workers);
    double centre = mean, scale = std::sqrt(var);
    if (spec.standardization == Standardization::empirical) {
      centre = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
      double ss = 0.0;
      for (double v : values) ss += (v - centre) * (v - centre);
      scale = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    if (!(scale > 0.0)) throw Error(ErrorKind::degenerate_linear_part, "statistic has zero variance");
    for (double& v : values) v = (v - centre) / scale;
    std::sort(values.begin(), values.end());

    const Expansion two{N, cs.kappa3.value, cs.kappa4.value, ExpansionOrder::two};
    ExperimentRecord rec;
    rec.N = N;
    rec.reps = spec.reps;
    rec.delta_normal = kolmogorov_distance(values, two.with_order(ExpansionOrder::zero)).distance;
    rec.delta_one = kolmogorov_distance(values, two.with_order(ExpansionOrder::one)).distance;
    rec.delta_two = kolmogorov_distance(values, two).distance;
    rec.mc_floor = dkw_floor(spec.reps);
    rec.n_times_delta_two = N * rec.delta_two;
    rec.kappa3 = cs.kappa3.value;
    rec.kappa4 = cs.kappa4.value;
    rec.sigma2 = cs.sigma2.value;
    rec.sigma_t2 = var;
    rec.mean = mean;
    rec.seed = spec.seed;
    result.records.push_back(rec);
  }

  std::vector<RatePoint> pts;
  for (const auto& r : result.records) pts.push_back({static_cast<double>(r.N), r.delta_two, r.mc_floor});
  result.rate = rate_fit(pts);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void write_csv(const ExperimentResult& result, std::ostream& os) {
  os << "N,reps,delta_normal,delta_one,delta_two,mc_floor,n_times_delta_two,kappa3,kappa4,sigma2,seed\n";
  char buf[512];
  for (const auto& r : result.records) {
    std::snprintf(buf, sizeof buf, "%d,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%llu\n", r.N, r.reps,
                  r.delta_normal, r.delta_one, r.delta_two, r.mc_floor, r.n_times_delta_two, r.kappa3, r.kappa4,
                  r.sigma2, static_cast<unsigned long long>(r.seed));
    os << buf;
  }
}

CounterexampleResult counterexample_probe(int N, std::vector<double> deltas, std::size_t reps, std::uint64_t seed,
                                          int workers, bool allow_non_square) {
  if (reps == 0) throw Error(ErrorKind::invalid_argument, "reps must be positive");
  if (N < 1) throw Error(ErrorKind::invalid_size, "N must be positive");
  const auto m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(N))));
  const bool odd_square = m * m == N && m % 2 == 1;
  if (!odd_square && !allow_non_square) throw Error(ErrorKind::invalid_size, "N must be the square of an odd integer");
  for (double d : deltas)
    if (!(d > 0.0 && d < 1.0)) throw Error(ErrorKind::invalid_argument, "delta must lie in (0, 1)");
  std::sort(deltas.begin(), deltas.end());

  const std::size_t L = deltas.size();
  const std::size_t blocks = block_count(reps);
  // Per block: [W = 1, interval hits per delta, |V| < delta hits per delta].
  std::vector<std::vector<std::uint64_t>> counts(blocks, std::vector<std::uint64_t>(1 + 2 * L, 0));
  const double root = std::sqrt(static_cast<double>(N));
  const Distribution uniform = Distribution::uniform(-0.5, 0.5);

  for_each_block(blocks, workers, [&](std::size_t block) {
    Rng rng = make_stream(seed, (static_cast<std::uint64_t>(N) << 32) + block);
    std::vector<double> x(static_cast<std::size_t>(N));
    auto& c = counts[block];
    for (std::size_t r = 0; r < block_length(reps, block); ++r) {
      uniform.draw(rng, x);
      double whole = 0.0, frac = 0.0;
      for (double xj : x) {
        const double y = root * xj;
        const double k = nearest_integer(y);
        whole += k;
        frac += y - k;
      }
      const double w = whole / N;
      const double v = frac / root;
      const double t = (w + v / root) * (1.0 - v / root);
      if (whole == static_cast<double>(N)) ++c[0];
      for (std::size_t i = 0; i < L; ++i) {
        const double d = deltas[i];
        if (t >= 1.0 - d * d / N && t <= 1.0) ++c[1 + i];
        if (std::abs(v) < d) ++c[1 + L + i];
      }
    }
  });

  std::vector<std::uint64_t> total(1 + 2 * L, 0);
  for (const auto& c : counts)
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += c[i];
  const double n = static_cast<double>(reps);
  auto proportion = [n](std::uint64_t k) {
    const double p = static_cast<double>(k) / n;
    return Estimate{p, std::sqrt(p * (1.0 - p) / n)};
  };

  CounterexampleResult out;
  out.N = N;
  out.reps = reps;
  out.seed = seed;
  out.odd_square = odd_square;
  out.p_w1 = proportion(total[0]);
  out.p_w1_times_n = out.p_w1.value * N;
  for (std::size_t i = 0; i < L; ++i) {
    CounterexampleLevel lvl;
    lvl.delta = deltas[i];
    lvl.p_interval = proportion(total[1 + i]);
    lvl.normalized = lvl.p_interval.value * N / deltas[i];
    lvl.p_v = proportion(total[1 + L + i]);
    lvl.product = out.p_w1.value * lvl.p_v.value;
    out.levels.push_back(lvl);
  }
  return out;
}

}  // namespace symstat
