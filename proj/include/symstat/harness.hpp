#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "symstat/cumulants.hpp"
#include "symstat/edgeworth.hpp"

namespace symstat {

enum class Standardization { theoretical, empirical };

/// Where sigma_T and E T come from for theoretical standardisation: the
/// decomposition (variance identity on the exact or quadrature tables), or an
/// independent Monte Carlo run with ten times the replications.
enum class SigmaSource { decomposition, mc_oracle };

struct ExperimentSpec {
  std::string family = "gini";  // gini | linear | example1 | u_statistic:<kernel>
  Distribution dist = Distribution::normal();
  std::vector<int> n_list;
  std::size_t reps = 100000;
  std::uint64_t seed = 0;
  ExpectMode cumulant_mode = ExpectMode::exact();
  Standardization standardization = Standardization::theoretical;
  SigmaSource sigma_source = SigmaSource::decomposition;
  QuadratureOptions quadrature;
  int workers = 1;
};

inline constexpr std::size_t kMinReps = 1000;

/// Throws on an empty or non-increasing N list or reps below kMinReps.
void validate(const ExperimentSpec& spec);

/// Statistic of the named family at sample size N.
SymmetricStatistic make_family(const std::string& family, int N);

struct ExperimentRecord {
  int N = 0;
  std::size_t reps = 0;
  double delta_normal = 0.0;
  double delta_one = 0.0;
  double delta_two = 0.0;
  double mc_floor = 0.0;
  double n_times_delta_two = 0.0;
  double kappa3 = 0.0;
  double kappa4 = 0.0;
  double sigma2 = 0.0;    // E g^2
  double sigma_t2 = 0.0;  // used for standardisation
  double mean = 0.0;
  std::uint64_t seed = 0;
};

struct RatePoint {
  double N;
  double delta;
  double floor;
};

struct RateFit {
  bool ok = false;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double band = 0.0;  // 2 standard errors of the slope
  int used = 0;
  std::string message;
};

/// OLS of log Delta on log N over points with Delta > 2 floor, the floor
/// removed in quadrature. Fewer than three usable points is reported as
/// insufficient signal rather than thrown.
RateFit rate_fit(std::span<const RatePoint> points);

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<ExperimentRecord> records;
  RateFit rate;
  double wall_seconds = 0.0;
};

/// sqrt(ln(2/alpha) / (2 reps)), the DKW band half-width.
double dkw_floor(std::size_t reps, double alpha = 0.05);

/// Statistic values in replication order: block b of 2^14 replications uses
/// stream (seed, stream_base + b), so the output is independent of `workers`.
std::vector<double> simulate_values(const SymmetricStatistic& T, const Distribution& dist, std::size_t reps,
                                    std::uint64_t seed, std::uint64_t stream_base, int workers);

ExperimentResult run(const ExperimentSpec& spec);

/// CSV with columns N, reps, delta_normal, delta_one, delta_two, mc_floor,
/// n_times_delta_two, kappa3, kappa4, sigma2, seed; 17 significant digits.
void write_csv(const ExperimentResult& result, std::ostream& os);

struct CounterexampleLevel {
  double delta = 0.0;
  Estimate p_interval;  // P{1 - delta^2/N <= T_N <= 1}
  double normalized = 0.0;  // p_interval * N / delta
  Estimate p_v;         // P{|V_N| < delta}
  double product = 0.0;  // P{W_N = 1} P{|V_N| < delta}
};

struct CounterexampleResult {
  int N = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  bool odd_square = true;
  Estimate p_w1;          // P{W_N = 1}
  double p_w1_times_n = 0.0;
  std::vector<CounterexampleLevel> levels;
};

/// All probabilities come from one coupled sample, so they are monotone in delta.
CounterexampleResult counterexample_probe(int N, std::vector<double> deltas, std::size_t reps, std::uint64_t seed,
                                          int workers = 1, bool allow_non_square = false);

}  // namespace symstat
