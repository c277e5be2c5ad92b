// Acceptance run: one PASS/FAIL line per criterion. `acceptance 3 5` runs a
// subset; no arguments runs all nine.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "symstat/charfn.hpp"
#include "symstat/concentration.hpp"
#include "symstat/cumulants.hpp"
#include "symstat/edgeworth.hpp"
#include "symstat/harness.hpp"
#include "symstat/hoeffding.hpp"

using namespace symstat;
using namespace symstat::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Criterion 1 ------------------------------------------------------------------

Outcome hoeffding_exactness() {
  Rng rng = make_stream(101, 0);
  double worst_recon = 0.0, worst_degen = 0.0, worst_var = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const int N = 2 + inst % 5;
    const int s = 2 + (inst / 5) % 3;
    const Distribution dist = random_finite_law(rng, s);
    const SymmetricStatistic T = random_symmetric_statistic(N, 7000 + inst);
    const CanonicalComponents cc(T, dist);
    const auto su = static_cast<std::size_t>(s);

    std::vector<std::vector<double>> comp(static_cast<std::size_t>(N) + 1);
    for (int k = 0; k <= N; ++k) comp[static_cast<std::size_t>(k)] = cc.component(k);

    // Reconstruction at every grid point: sum over all subsets A of T_A(x_A).
    const auto& atoms = dist.support();
    std::vector<double> x(static_cast<std::size_t>(N));
    for_each_grid_point(N, su, [&](std::span<const std::size_t> idx) {
      for (int i = 0; i < N; ++i) x[static_cast<std::size_t>(i)] = atoms[idx[static_cast<std::size_t>(i)]].point;
      double total = 0.0;
      for (std::uint32_t A = 0; A < (1u << N); ++A) {
        std::size_t flat = 0, stride = 1;
        for (int i = 0; i < N; ++i)
          if (A >> i & 1u) {
            flat += cc.index_of(x[static_cast<std::size_t>(i)]) * stride;
            stride *= su;
          }
        total += comp[static_cast<std::size_t>(std::popcount(A))][flat];
      }
      worst_recon = std::max(worst_recon, std::abs(total - T(x)));
    });

    // Degeneracy: integrating any one argument of T_k gives zero.
    const Eigen::VectorXd& w = cc.weights();
    for (int k = 1; k <= N; ++k) {
      const auto& tab = comp[static_cast<std::size_t>(k)];
      std::size_t stride = 1;
      for (int axis = 0; axis < k; ++axis, stride *= su) {
        for (std::size_t base = 0; base < tab.size(); ++base) {
          if ((base / stride) % su != 0) continue;
          double acc = 0.0;
          for (std::size_t v = 0; v < su; ++v) acc += w[static_cast<Eigen::Index>(v)] * tab[base + v * stride];
          worst_degen = std::max(worst_degen, std::abs(acc));
        }
      }
    }

    // Variance identity against direct enumeration of Var T.
    double identity = 0.0;
    for (int k = 1; k <= N; ++k) identity += binom(N, k) * cc.component_variance(k);
    worst_var = std::max(worst_var, std::abs(identity - brute_variance(T, dist)));
  }
  Outcome o;
  o.pass = worst_recon <= 1e-9 && worst_degen <= 1e-10 && worst_var <= 1e-10;
  o.detail = fmt("max reconstruction error %.2e, max degeneracy %.2e, max variance identity error %.2e", worst_recon,
                 worst_degen, worst_var);
  return o;
}

// Criterion 2 ------------------------------------------------------------------

Outcome moment_inequalities() {
  Rng rng = make_stream(202, 0);
  int failures = 0, inequalities = 0;
  double min_gap = INFINITY;
  for (int inst = 0; inst < 100; ++inst) {
    const int N = 4 + inst % 3;
    const Distribution dist = random_finite_law(rng, 2 + inst % 3);
    const SymmetricStatistic T =
        inst % 2 == 0 ? random_symmetric_statistic(N, 9000 + inst) : random_polynomial_statistic(N, rng);
    const MomentIdentityReport rep = verify_moment_identities(T, dist);
    for (const auto& c : rep.checks) {
      if (!c.pass) ++failures;
      if (c.identity) continue;
      ++inequalities;
      // Independent sign check on the reported sides.
      const double scale = std::max({1.0, std::abs(c.lhs), std::abs(c.rhs)});
      if (c.lhs > c.rhs + 1e-12 * scale) ++failures;
      min_gap = std::min(min_gap, (c.rhs - c.lhs) / scale);
    }
  }
  Outcome o;
  o.pass = failures == 0 && inequalities > 0;
  o.detail = "100 instances, " + std::to_string(inequalities) + " inequalities, " + std::to_string(failures) +
             " failures, smallest relative gap " + fmt("%.2e", min_gap);
  return o;
}

// Criterion 3 ------------------------------------------------------------------

Outcome cumulant_ground_truths() {
  Outcome o;
  const auto rad = Distribution::rademacher();

  const int N = 4;
  const SymmetricStatistic lin = linear_statistic([](double x) { return x / 2.0; }, N, "linear");
  const CumulantSet lc = cumulants(decompose(lin, rad), rad, ExpectMode::exact());
  const bool lin_ok = lc.kappa3.value == 0.0 && lc.kappa4.value == -2.0;

  const SymmetricStatistic red = u_statistic(named_kernel("product_plus_sum"), 6);
  const ReducibilityReport rr = reducibility(decompose(red, rad), rad, ExpectMode::exact());
  const bool red_ok = rr.delta3_sq.value <= 1e-10;

  const auto normal = Distribution::normal();
  const SymmetricStatistic gini = gini_statistic(20);
  const ReducibilityReport gr =
      reducibility(decompose_quadratic(gini, normal), normal, ExpectMode::mc(1000000, 303));
  const double z = gr.delta3_sq.value / gr.delta3_sq.std_error;
  const bool gini_ok = z >= 5.0;

  o.pass = lin_ok && red_ok && gini_ok;
  o.detail = fmt("linear kappa3=%.17g kappa4=%.17g; ", lc.kappa3.value, lc.kappa4.value) +
             fmt("xy+x+y delta3^2=%.2e; ", rr.delta3_sq.value) +
             fmt("Gini delta3^2=%.4e (%.1f SE)", gr.delta3_sq.value, z);
  return o;
}

// Criterion 4 ------------------------------------------------------------------

Outcome edgeworth_evaluator() {
  double worst_g0 = 0.0, worst_ft = 0.0;
  bool ft0 = true;
  const double phi0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const std::vector<Expansion> cases = {{10, 1.0, 0.0}, {100, 1.0, 3.0}, {50, -2.5, 4.0}, {1000, 0.3, -1.2},
                                        {20, 4.0, 6.0}};
  for (const auto& e : cases) {
    worst_g0 = std::max(worst_g0, std::abs(evaluate(e, 0.0) - (0.5 + e.kappa3 * phi0 / (6.0 * std::sqrt(e.N)))));
    ft0 = ft0 && fourier_transform(e, 0.0) == std::complex<double>(1.0, 0.0);
    for (int i = 0; i <= 80; ++i) {
      const double t = -20.0 + 0.5 * i;
      // Quadrature of e^{itx} dG(x) = e^{itx} G'(x) dx on panels of unit width.
      double re = 0.0, im = 0.0;
      for (int p = -14; p < 14; ++p) {
        re += boost::math::quadrature::gauss<double, 30>::integrate(
            [&](double x) { return std::cos(t * x) * density(e, x); }, p, p + 1.0);
        im += boost::math::quadrature::gauss<double, 30>::integrate(
            [&](double x) { return std::sin(t * x) * density(e, x); }, p, p + 1.0);
      }
      worst_ft = std::max(worst_ft, std::abs(fourier_transform(e, t) - std::complex<double>(re, im)));
    }
  }
  Outcome o;
  o.pass = worst_g0 <= 1e-12 && worst_ft <= 1e-6 && ft0;
  o.detail = fmt("max |G(0) - closed form| %.2e, max |Ghat - quadrature| on |t|<=20 %.2e, Ghat(0)==1: ", worst_g0,
                 worst_ft) +
             (ft0 ? "yes" : "no");
  return o;
}

// Criteria 5 and 9 -------------------------------------------------------------

// Pinned from the first seeded run; the run is deterministic, so drift beyond
// rounding means the pipeline changed.
struct Baseline {
  int N;
  double delta_normal, delta_one, delta_two;
};
const std::vector<Baseline> kCriterion5Baseline = {
    {20, 0.012261057582683643, 0.0024494245952246807, 0.0021316157415123271},
    {50, 0.0071239073763899041, 0.00061416399125191479, 0.00047204407917253444},
    {100, 0.0045262918745506697, 0.0009980594510149432, 0.00083795740950109998},
    {200, 0.004407750043176728, 0.0013204146539199102, 0.0012660851601107304},
};

ExperimentSpec criterion5_spec(int workers) {
  ExperimentSpec spec;
  spec.family = "gini";
  spec.dist = Distribution::normal();
  spec.n_list = {20, 50, 100, 200};
  spec.reps = 1000000;
  spec.seed = 20240501;
  spec.workers = workers;
  return spec;
}

std::string criterion5_csv;

Outcome convergence_ordering() {
  const ExperimentResult res = run(criterion5_spec(1));
  std::ostringstream csv;
  write_csv(res, csv);
  criterion5_csv = csv.str();

  Outcome o;
  std::string detail;
  for (const auto& r : res.records) {
    detail += fmt("N=%g: normal %.5f one %.5f two %.5f", r.N, r.delta_normal, r.delta_one, r.delta_two);
    detail += fmt(" (floor %.5f); ", r.mc_floor);
    if (r.N == 100 || r.N == 200) {
      const double margin = 2.0 * r.mc_floor;
      if (!(r.delta_one - r.delta_two > margin && r.delta_normal - r.delta_one > margin)) o.pass = false;
    }
  }
  // |Delta_one - Delta_two| <= sup|G_one - G_two| and likewise for the normal
  // term, so these suprema cap the attainable margins whatever the replications.
  for (const auto& r : res.records) {
    if (r.N != 100 && r.N != 200) continue;
    const Expansion e{r.N, r.kappa3, r.kappa4};
    double cap_one = 0.0, cap_normal = 0.0;
    for (double x = -8.0; x <= 8.0; x += 1e-3) {
      const ExpansionTerms t = expansion_terms(e, x);
      cap_one = std::max(cap_one, std::abs(t.kurtosis + t.skewness_sq));
      cap_normal = std::max(cap_normal, std::abs(t.skewness));
    }
    detail += fmt("N=%g: margin caps one-two %.5f normal-one %.5f vs 2 floor %.5f; ", r.N, cap_one, cap_normal,
                  2.0 * r.mc_floor);
  }
  for (std::size_t k = 1; k < res.records.size(); ++k) {
    const auto& a = res.records[k - 1];
    const auto& b = res.records[k];
    if (b.n_times_delta_two > a.n_times_delta_two + 2.0 * b.mc_floor * b.N) o.pass = false;
  }
  for (const auto& b : kCriterion5Baseline)
    for (const auto& r : res.records)
      if (r.N == b.N && (std::abs(r.delta_normal - b.delta_normal) > 1e-9 ||
                         std::abs(r.delta_one - b.delta_one) > 1e-9 || std::abs(r.delta_two - b.delta_two) > 1e-9)) {
        o.pass = false;
        detail += "baseline drift at N=" + std::to_string(r.N) + "; ";
      }
  detail += fmt("%.1f s", res.wall_seconds);
  o.detail = detail;
  return o;
}

Outcome determinism() {
  if (criterion5_csv.empty()) convergence_ordering();
  const ExperimentResult res = run(criterion5_spec(4));
  std::ostringstream csv;
  write_csv(res, csv);
  Outcome o;
  o.pass = csv.str() == criterion5_csv;
  o.detail = std::string("workers 1 vs 4: CSV ") + (o.pass ? "byte-identical" : "differs");
  return o;
}

// Criterion 6 ------------------------------------------------------------------

// Pinned from the first seeded run (about half the smallest observed value).
constexpr double kIntervalLevel = 0.002;
constexpr double kW1Level = 0.001;

Outcome counterexample() {
  Outcome o;
  std::string detail;
  for (int N : {25, 49, 81, 121}) {
    const CounterexampleResult r = counterexample_probe(N, {0.5}, 10000000, 606);
    const double normalized = r.levels.front().normalized;
    detail += fmt("N=%g: P(interval)N/delta %.4f, P(W=1)N %.4f; ", N, normalized, r.p_w1_times_n);
    if (!(normalized > kIntervalLevel && r.p_w1_times_n > kW1Level)) o.pass = false;
  }
  o.detail = detail;
  return o;
}

// Criterion 7 ------------------------------------------------------------------

Outcome kleitman() {
  Outcome o;
  int bad_equal = 0, exceed = 0, bad_partition = 0;
  for (int n = 0; n <= 12; ++n) {
    SignedSumInstance inst{std::vector<Eigen::VectorXd>(static_cast<std::size_t>(n), Eigen::VectorXd::Ones(1)), 1.0};
    if (max_ball_count(inst).count != kleitman_bound(n)) ++bad_equal;
  }
  Rng rng = make_stream(707, 0);
  for (int i = 0; i < 500; ++i) {
    const int d = i % 2 == 0 ? 1 : 3;
    const int n = 1 + static_cast<int>(uniform01(rng) * 14);
    SignedSumInstance inst;
    inst.r = 0.5 + uniform01(rng);
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd v(d);
      for (int c = 0; c < d; ++c) v[c] = 2.0 * uniform01(rng) - 1.0;
      // Half the instances sit exactly on the norm threshold.
      const double target = inst.r * (i % 4 < 2 ? 1.0 : 1.0 + 2.0 * uniform01(rng));
      v *= target / std::max(v.norm(), 1e-3);
      if (v.norm() < inst.r) v *= inst.r / v.norm();
      inst.vectors.push_back(v);
    }
    if (max_ball_count(inst).count > kleitman_bound(n)) ++exceed;
    if (n <= 12) {
      const SymmetricPartition p = symmetric_partition(inst);
      if (!(p.covering && p.sparse && p.classes.size() == kleitman_bound(n))) ++bad_partition;
    }
  }
  o.pass = bad_equal == 0 && exceed == 0 && bad_partition == 0;
  o.detail = "all-equal mismatches " + std::to_string(bad_equal) + ", bound violations " + std::to_string(exceed) +
             "/500, uncertified partitions " + std::to_string(bad_partition);
  return o;
}

// Criterion 8 ------------------------------------------------------------------

Outcome characteristic_functions() {
  Outcome o;
  const RhoResult rn = cramer_rho(normal_cf(), 1.0, 10.0);
  const double rn_err = std::abs(rn.rho - (1.0 - std::exp(-0.5)));
  const RhoResult rr = cramer_rho(discrete_cf(Eigen::Vector2d(-1.0, 1.0), Eigen::Vector2d(0.5, 0.5)), 1.0, 4.0);

  bool alpha_ok = true;
  for (int N : {10000, 1000000}) {
    const auto stat = linear_statistic([](double x) { return x; }, N, "sum");
    for (const auto& dist : {Distribution::normal(), Distribution::rademacher()})
      alpha_ok = alpha_ok && verify_alpha_bound(decompose_quadratic(stat, dist)).all_pass();
  }

  // Band limit of the k = 2 kernel at the calibrated scale: numerical Fourier
  // transform of the density, truncated where the tail is below 1e-4.
  const double a = calibrate_smoothing_scale(2, 0.75);
  const SmoothingKernel ker(a, 2);
  const double L = 4000.0 / a;
  const double panel = std::numbers::pi / a;
  double worst_in = 0.0, worst_out = 0.0;
  for (double t : {0.0, 0.3 * a, a, 1.7 * a, 1.99 * a, 2.01 * a, 2.5 * a, 4.0 * a, 10.0 * a}) {
    double integral = 0.0;
    for (double lo = 0.0; lo < L; lo += panel)
      integral += 2.0 * boost::math::quadrature::gauss<double, 20>::integrate(
                            [&](double x) { return std::cos(t * x) * ker.density(x); }, lo, lo + panel);
    if (t < 2.0 * a)
      worst_in = std::max(worst_in, std::abs(integral - ker.cf(t)));
    else
      worst_out = std::max(worst_out, std::abs(integral) + std::abs(ker.cf(t)));
  }

  o.pass = rn_err <= 1e-6 && rr.rho <= 1e-6 && alpha_ok && worst_in <= 1e-3 && worst_out <= 1e-3;
  o.detail = fmt("normal rho(1,10) error %.2e; Rademacher rho(1,4) %.2e; ", rn_err, rr.rho) +
             "alpha bound " + (alpha_ok ? "holds" : "violated") +
             fmt("; kernel a=%.6f band error inside %.2e outside %.2e", a, worst_in, worst_out);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"hoeffding exactness", hoeffding_exactness},
      {"moment inequalities", moment_inequalities},
      {"cumulant ground truths", cumulant_ground_truths},
      {"edgeworth evaluator", edgeworth_evaluator},
      {"convergence ordering", convergence_ordering},
      {"counterexample", counterexample},
      {"kleitman bound", kleitman},
      {"characteristic functions", characteristic_functions},
      {"determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
