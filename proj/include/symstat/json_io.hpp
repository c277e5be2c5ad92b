#pragma once

#include <json.hpp>

#include "symstat/charfn.hpp"
#include "symstat/concentration.hpp"
#include "symstat/conditions.hpp"
#include "symstat/harness.hpp"

namespace symstat {

using json = nlohmann::json;

/// {"kind":"finite","support":[[x,p],...]} or
/// {"kind":"sampler","name":"normal|uniform|rademacher","params":{...},"seed":u64}.
Distribution distribution_from_json(const json& j);
json to_json(const Distribution& d);

/// {"family": "gini" | "example1" | "linear" | "sample_mean" | "u_statistic:<kernel>", "N": n}.
SymmetricStatistic statistic_from_json(const json& j);

/// {"vectors": [[...], ...], "r": 1.0}; bare numbers are one-dimensional vectors.
SignedSumInstance instance_from_json(const json& j);

QuadratureOptions quadrature_from_json(const json& j);
ConditionParams condition_params_from_json(const json& j);
ExperimentSpec experiment_from_json(const json& j);

json to_json(const Estimate& e);
json to_json(const HoeffdingDecomposition& dec);
json to_json(const DifferenceMoments& dm);
json to_json(const MomentIdentityReport& rep);
json to_json(const CumulantSet& cs);
json to_json(const ReducibilityReport& rep);
json to_json(const RhoResult& r);
json to_json(const ConditionReport& rep);
json to_json(const AlphaBoundReport& rep);
json to_json(const BallCount& bc);
json to_json(const SymmetricPartition& p);
json to_json(const ExperimentResult& res);
json to_json(const CounterexampleResult& res);

}  // namespace symstat
