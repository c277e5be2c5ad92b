#include <doctest.h>

#include "symstat/error.hpp"
#include "symstat/json_io.hpp"

using namespace symstat;

TEST_CASE("json: distributions round trip") {
  const json finite = json::parse(R"({"kind":"finite","support":[[-1.0,0.25],[2.0,0.75]],"seed":7})");
  const auto d = distribution_from_json(finite);
  CHECK(d.law() == Law::finite);
  CHECK(d.support().size() == 2);
  CHECK(to_json(d) == finite);

  for (const char* text : {R"({"kind":"sampler","name":"normal","params":{"mean":1.5,"sd":2.0},"seed":3})",
                           R"({"kind":"sampler","name":"uniform","params":{"lo":-0.5,"hi":0.5},"seed":0})",
                           R"({"kind":"sampler","name":"rademacher","params":{},"seed":11})"}) {
    const json j = json::parse(text);
    CHECK(to_json(distribution_from_json(j)) == j);
  }
  const auto dflt = distribution_from_json(json::parse(R"({"kind":"sampler","name":"normal"})"));
  CHECK(dflt.parameters().first == 0.0);
  CHECK(dflt.parameters().second == 1.0);
}

TEST_CASE("json: distribution errors") {
  CHECK_THROWS_AS(distribution_from_json(json::parse(R"({"kind":"weird"})")), Error);
  CHECK_THROWS_AS(distribution_from_json(json::parse(R"({"kind":"sampler","name":"cauchy"})")), Error);
  CHECK_THROWS_AS(distribution_from_json(json::parse(R"({"kind":"finite","support":[[0.0,0.4],[1.0,0.4]]})")), Error);
  CHECK_THROWS(distribution_from_json(json::parse(R"({"name":"normal"})")));
}

TEST_CASE("json: statistics and instances") {
  const auto T = statistic_from_json(json::parse(R"({"family":"gini","N":12})"));
  CHECK(T.size() == 12);
  CHECK(statistic_from_json(json::parse(R"({"family":"sample_mean","N":3})")).size() == 3);
  CHECK_THROWS_AS(statistic_from_json(json::parse(R"({"family":"nope","N":3})")), Error);

  const auto line = instance_from_json(json::parse(R"({"vectors":[1.0,2.0,3.5]})"));
  CHECK(line.r == 1.0);
  CHECK(line.size() == 3);
  CHECK(line.dimension() == 1);
  const auto plane = instance_from_json(json::parse(R"({"r":0.5,"vectors":[[1,0],[0,2]]})"));
  CHECK(plane.dimension() == 2);
  CHECK(plane.vectors[1][1] == 2.0);
  CHECK_THROWS_AS(instance_from_json(json::parse(R"({"vectors":[0.2]})")), Error);
}

TEST_CASE("json: parameter blocks") {
  const auto q = quadrature_from_json(json::parse(R"({"panels":32,"breakpoints":[0.0]})"));
  CHECK(q.panels == 32);
  CHECK(q.order == QuadratureOptions{}.order);
  CHECK(q.breakpoints == std::vector<double>{0.0});
  CHECK(quadrature_from_json(json()).panels == QuadratureOptions{}.panels);

  const auto p = condition_params_from_json(json::parse(R"({"r":6,"A_star":2.5})"));
  CHECK(p.r == 6.0);
  CHECK(p.s == ConditionParams{}.s);
  REQUIRE(p.A_star.has_value());
  CHECK(*p.A_star == 2.5);
  CHECK_FALSE(p.M_star.has_value());
}

TEST_CASE("json: experiment specs") {
  const auto s = experiment_from_json(json::parse(
      R"({"family":"linear","n_list":[5,10],"reps":2000,"seed":9,"cumulant_mode":{"mc":5000},
          "standardization":"empirical","sigma_source":"mc_oracle","workers":2,
          "distribution":{"kind":"sampler","name":"uniform","params":{"lo":0,"hi":1}}})"));
  CHECK(s.family == "linear");
  CHECK(s.n_list == std::vector<int>{5, 10});
  CHECK(s.reps == 2000);
  CHECK(s.seed == 9);
  CHECK(s.standardization == Standardization::empirical);
  CHECK(s.sigma_source == SigmaSource::mc_oracle);
  CHECK(s.workers == 2);
  CHECK(s.dist.law() == Law::uniform);

  const auto d = experiment_from_json(json::parse(R"({"n_list":[10]})"));
  CHECK(d.family == "gini");
  CHECK(d.standardization == Standardization::theoretical);
  CHECK(d.sigma_source == SigmaSource::decomposition);

  CHECK_THROWS(experiment_from_json(json::parse(R"({"family":"gini"})")));
  CHECK_THROWS_AS(experiment_from_json(json::parse(R"({"n_list":[10],"standardization":"z"})")), Error);
  CHECK_THROWS_AS(experiment_from_json(json::parse(R"({"n_list":[10],"sigma_source":"z"})")), Error);
  CHECK_THROWS_AS(experiment_from_json(json::parse(R"({"n_list":[10],"cumulant_mode":"fast"})")), Error);
}

TEST_CASE("json: results serialise with every column") {
  ExperimentResult res;
  ExperimentRecord r;
  r.N = 10;
  r.delta_two = 0.125;
  res.records.push_back(r);
  const json j = to_json(res);
  REQUIRE(j.contains("records"));
  CHECK(j["records"][0]["N"] == 10);
  CHECK(j["records"][0]["delta_two"] == 0.125);
  for (const char* key : {"delta_normal", "delta_one", "mc_floor", "n_times_delta_two", "kappa3", "kappa4", "sigma2"})
    CHECK(j["records"][0].contains(key));
}
