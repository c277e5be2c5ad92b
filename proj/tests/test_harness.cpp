#include <doctest.h>

#include <cmath>
#include <sstream>

#include "symstat/error.hpp"
#include "symstat/harness.hpp"

using namespace symstat;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::invalid_argument;
}

}  // namespace

TEST_CASE("rate fit: synthetic examples") {
  std::vector<RatePoint> exact;
  for (double N : {10.0, 20.0, 50.0, 100.0, 200.0}) exact.push_back({N, 0.3 / N, 0.0});
  const RateFit f = rate_fit(exact);
  REQUIRE(f.ok);
  CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(f.intercept == doctest::Approx(std::log(0.3)).epsilon(1e-9));
  CHECK(f.used == 5);

  Rng rng = make_stream(71, 0);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<RatePoint> noisy;
  for (double N : {10.0, 20.0, 40.0, 80.0, 160.0, 320.0}) noisy.push_back({N, 0.5 * std::pow(N, -1.3) * (1.0 + noise(rng)), 0.0});
  const RateFit g = rate_fit(noisy);
  REQUIRE(g.ok);
  CHECK(g.slope >= -1.4);
  CHECK(g.slope <= -1.2);
  CHECK(g.band == doctest::Approx(2.0 * g.slope_se));

  std::vector<RatePoint> floor_only;
  for (double N : {10.0, 20.0, 40.0}) floor_only.push_back({N, 0.001, 0.001});
  const RateFit h = rate_fit(floor_only);
  CHECK_FALSE(h.ok);
  CHECK(h.message.find("insufficient-signal") != std::string::npos);
}

TEST_CASE("dkw floor") {
  CHECK(dkw_floor(1000000) == doctest::Approx(std::sqrt(std::log(40.0) / 2e6)).epsilon(1e-15));
  CHECK(dkw_floor(1000, 0.1) == doctest::Approx(std::sqrt(std::log(20.0) / 2000.0)).epsilon(1e-15));
}

TEST_CASE("experiment spec validation") {
  ExperimentSpec spec;
  spec.n_list = {};
  CHECK(kind_of([&] { validate(spec); }) == ErrorKind::invalid_argument);
  spec.n_list = {10, 10};
  CHECK(kind_of([&] { validate(spec); }) == ErrorKind::invalid_argument);
  spec.n_list = {10, 20};
  spec.reps = 999;
  CHECK(kind_of([&] { validate(spec); }) == ErrorKind::invalid_argument);
  spec.reps = 1000;
  validate(spec);
  CHECK(kind_of([] { make_family("nope", 5); }) == ErrorKind::invalid_argument);
  CHECK(make_family("u_statistic:abs_diff", 5).size() == 5);
}

TEST_CASE("simulation is independent of the worker count") {
  const auto T = gini_statistic(15);
  const auto dist = Distribution::normal();
  const auto a = simulate_values(T, dist, 40000, 9, 0, 1);
  const auto b = simulate_values(T, dist, 40000, 9, 0, 3);
  CHECK(a == b);
  const auto c = simulate_values(T, dist, 40000, 10, 0, 1);
  CHECK(a != c);
}

TEST_CASE("run: linear statistic on the normal law sits at the noise floor") {
  ExperimentSpec spec;
  spec.family = "linear";
  spec.dist = Distribution::normal();
  spec.n_list = {5, 10, 20};
  spec.reps = 20000;
  spec.seed = 3;
  const auto res = run(spec);
  REQUIRE(res.records.size() == 3);
  for (const auto& r : res.records) {
    CHECK(r.delta_normal <= 2.0 * r.mc_floor);
    CHECK(r.delta_normal == r.delta_two);
    CHECK(r.kappa3 == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    CHECK(r.sigma_t2 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.delta_two >= 0.0);
    CHECK(r.delta_two <= 1.0);
  }
  CHECK_FALSE(res.rate.ok);

  std::ostringstream a, b;
  write_csv(res, a);
  spec.workers = 2;
  write_csv(run(spec), b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("N,reps,delta_normal,delta_one,delta_two,mc_floor,n_times_delta_two,kappa3,kappa4,sigma2,seed\n",
                      0) == 0);
}

TEST_CASE("run: theoretical and empirical standardisation agree on the rate") {
  ExperimentSpec spec;
  spec.family = "gini";
  spec.dist = Distribution::normal();
  spec.n_list = {4, 6, 10, 20};
  spec.reps = 100000;
  spec.seed = 17;
  const auto theo = run(spec);
  spec.standardization = Standardization::empirical;
  const auto emp = run(spec);
  std::vector<RatePoint> pt, pe;
  for (std::size_t i = 0; i < theo.records.size(); ++i) {
    pt.push_back({static_cast<double>(theo.records[i].N), theo.records[i].delta_normal, theo.records[i].mc_floor});
    pe.push_back({static_cast<double>(emp.records[i].N), emp.records[i].delta_normal, emp.records[i].mc_floor});
  }
  const RateFit ft = rate_fit(pt), fe = rate_fit(pe);
  REQUIRE(ft.ok);
  REQUIRE(fe.ok);
  CHECK(std::abs(ft.slope - fe.slope) <= ft.band + fe.band);
  const auto& r10t = theo.records[2];
  const auto& r10e = emp.records[2];
  CHECK(std::abs(r10t.delta_normal - r10e.delta_normal) <= 2.0 * r10t.mc_floor);
}

TEST_CASE("run: sigma from a Monte Carlo oracle") {
  ExperimentSpec spec;
  spec.family = "gini";
  spec.n_list = {10, 20};
  spec.reps = 5000;
  spec.seed = 4;
  const auto a = run(spec);
  spec.sigma_source = SigmaSource::mc_oracle;
  const auto b = run(spec);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(b.records[i].sigma_t2 == doctest::Approx(a.records[i].sigma_t2).epsilon(0.05));
    CHECK(b.records[i].mean == doctest::Approx(a.records[i].mean).epsilon(0.01));
  }
}

TEST_CASE("counterexample probe") {
  CHECK(kind_of([] { counterexample_probe(9, {0.5}, 0, 1); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([] { counterexample_probe(10, {0.5}, 100, 1); }) == ErrorKind::invalid_size);
  CHECK(kind_of([] { counterexample_probe(16, {0.5}, 100, 1); }) == ErrorKind::invalid_size);
  CHECK(kind_of([] { counterexample_probe(9, {1.5}, 100, 1); }) == ErrorKind::invalid_argument);
  const auto loose = counterexample_probe(10, {0.5}, 1000, 1, 1, true);
  CHECK_FALSE(loose.odd_square);

  const auto r = counterexample_probe(9, {0.9, 0.2, 0.5, 0.7}, 1000000, 2024);
  REQUIRE(r.levels.size() == 4);
  CHECK(r.odd_square);
  CHECK(r.p_w1.value > 0.0);
  for (std::size_t i = 1; i < r.levels.size(); ++i) {
    CHECK(r.levels[i].delta > r.levels[i - 1].delta);
    CHECK(r.levels[i].p_interval.value >= r.levels[i - 1].p_interval.value);
    CHECK(r.levels[i].p_v.value >= r.levels[i - 1].p_v.value);
  }
  const auto& half = r.levels[1];
  CHECK(half.delta == 0.5);
  CHECK(half.p_interval.value > 0.0);
  CHECK(half.normalized == doctest::Approx(half.p_interval.value * 9 / 0.5));
  CHECK(half.product == doctest::Approx(r.p_w1.value * half.p_v.value));
  // Regression baseline for the seeded run.
  CHECK(half.p_interval.value * 1e6 == doctest::Approx(43.0).epsilon(1e-12));
  const auto again = counterexample_probe(9, {0.9, 0.2, 0.5, 0.7}, 1000000, 2024, 3);
  CHECK(again.levels[1].p_interval.value == half.p_interval.value);
  CHECK(again.p_w1.value == r.p_w1.value);
}
