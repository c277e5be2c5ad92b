#include "symstat/json_io.hpp"

#include "symstat/error.hpp"

namespace symstat {

namespace {

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec(m.row(i).transpose()));
  return rows;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

json estimate_map(const std::map<double, Estimate>& m) {
  json out = json::array();
  for (const auto& [t, e] : m) out.push_back({{"order", t}, {"value", e.value}, {"std_error", e.std_error}});
  return out;
}

}  // namespace

Distribution distribution_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const auto seed = get_or<std::uint64_t>(j, "seed", 0);
  if (kind == "finite") {
    std::vector<Atom> atoms;
    for (const auto& pair : j.at("support")) atoms.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
    return Distribution::finite(std::move(atoms), seed);
  }
  if (kind != "sampler") throw Error(ErrorKind::invalid_argument, "distribution kind must be finite or sampler");
  const std::string name = j.at("name").get<std::string>();
  const json params = j.value("params", json::object());
  if (name == "normal") return Distribution::normal(get_or(params, "mean", 0.0), get_or(params, "sd", 1.0), seed);
  if (name == "uniform") return Distribution::uniform(get_or(params, "lo", 0.0), get_or(params, "hi", 1.0), seed);
  if (name == "rademacher") return Distribution::rademacher(seed);
  throw Error(ErrorKind::invalid_argument, "unknown sampler '" + name + "'");
}

json to_json(const Distribution& d) {
  if (d.law() == Law::finite) {
    json support = json::array();
    for (const auto& a : d.support()) support.push_back({a.point, a.prob});
    return {{"kind", "finite"}, {"support", support}, {"seed", d.seed()}};
  }
  const auto [a, b] = d.parameters();
  json out{{"kind", "sampler"}, {"seed", d.seed()}};
  switch (d.law()) {
    case Law::normal:
      out["name"] = "normal";
      out["params"] = {{"mean", a}, {"sd", b}};
      break;
    case Law::uniform:
      out["name"] = "uniform";
      out["params"] = {{"lo", a}, {"hi", b}};
      break;
    default:
      out["name"] = "rademacher";
      out["params"] = json::object();
  }
  return out;
}

SymmetricStatistic statistic_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  const int N = j.at("N").get<int>();
  if (family == "sample_mean") return sample_mean(N);
  return make_family(family, N);
}

SignedSumInstance instance_from_json(const json& j) {
  SignedSumInstance inst;
  inst.r = get_or(j, "r", 1.0);
  for (const auto& v : j.at("vectors")) {
    if (v.is_number()) {
      inst.vectors.push_back(Eigen::VectorXd::Constant(1, v.get<double>()));
    } else {
      const auto xs = v.get<std::vector<double>>();
      inst.vectors.push_back(Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size())));
    }
  }
  validate(inst);
  return inst;
}

QuadratureOptions quadrature_from_json(const json& j) {
  QuadratureOptions q;
  if (j.is_null()) return q;
  q.panels = get_or(j, "panels", q.panels);
  q.order = get_or(j, "order", q.order);
  q.normal_halfwidth = get_or(j, "normal_halfwidth", q.normal_halfwidth);
  if (j.contains("breakpoints")) q.breakpoints = j.at("breakpoints").get<std::vector<double>>();
  return q;
}

ConditionParams condition_params_from_json(const json& j) {
  ConditionParams p;
  if (j.is_null()) return p;
  p.r = get_or(j, "r", p.r);
  p.s = get_or(j, "s", p.s);
  p.nu1 = get_or(j, "nu1", p.nu1);
  p.nu2 = get_or(j, "nu2", p.nu2);
  auto opt = [&](const char* key, std::optional<double>& slot) {
    if (j.contains(key)) slot = j.at(key).get<double>();
  };
  opt("A_star", p.A_star);
  opt("M_star", p.M_star);
  opt("D_star", p.D_star);
  opt("delta", p.delta);
  opt("delta_star", p.delta_star);
  return p;
}

ExperimentSpec experiment_from_json(const json& j) {
  ExperimentSpec s;
  s.family = get_or<std::string>(j, "family", s.family);
  if (j.contains("distribution")) s.dist = distribution_from_json(j.at("distribution"));
  s.n_list = j.at("n_list").get<std::vector<int>>();
  s.reps = get_or<std::size_t>(j, "reps", s.reps);
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
  if (j.contains("cumulant_mode")) {
    const json& m = j.at("cumulant_mode");
    if (m.is_string() && m.get<std::string>() == "exact") {
      s.cumulant_mode = ExpectMode::exact();
    } else if (m.is_object() && m.contains("mc")) {
      s.cumulant_mode = ExpectMode::mc(m.at("mc").get<std::size_t>(), get_or<std::uint64_t>(m, "seed", s.seed));
    } else {
      throw Error(ErrorKind::invalid_argument, "cumulant_mode must be \"exact\" or {\"mc\": reps}");
    }
  }
  const std::string st = get_or<std::string>(j, "standardization", "theoretical");
  if (st != "theoretical" && st != "empirical")
    throw Error(ErrorKind::invalid_argument, "standardization must be theoretical or empirical");
  s.standardization = st == "empirical" ? Standardization::empirical : Standardization::theoretical;
  const std::string src = get_or<std::string>(j, "sigma_source", "decomposition");
  if (src != "decomposition" && src != "mc_oracle")
    throw Error(ErrorKind::invalid_argument, "sigma_source must be decomposition or mc_oracle");
  s.sigma_source = src == "mc_oracle" ? SigmaSource::mc_oracle : SigmaSource::decomposition;
  s.quadrature = quadrature_from_json(j.value("quadrature", json()));
  s.workers = get_or(j, "workers", s.workers);
  return s;
}

json to_json(const Estimate& e) { return {{"value", e.value}, {"std_error", e.std_error}}; }

json to_json(const HoeffdingDecomposition& dec) {
  json out{{"N", dec.N},
           {"mean", dec.mean},
           {"variance", dec.variance},
           {"sigma2", dec.component_variance.size() > 1 ? dec.sigma2() : 0.0},
           {"component_variance", dec.component_variance},
           {"source", dec.source == TableSource::support      ? "support"
                      : dec.source == TableSource::quadrature ? "quadrature"
                                                              : "none"}};
  if (dec.tables) {
    const KernelTables& t = *dec.tables;
    json chi = json::array();
    for (const auto& slice : t.chi) chi.push_back(mat(slice));
    out["tables"] = {{"points", vec(t.points)}, {"weights", vec(t.weights)}, {"g", vec(t.g)}, {"psi", mat(t.psi)},
                     {"chi", chi}};
  }
  return out;
}

json to_json(const DifferenceMoments& dm) {
  json out = json::array();
  for (int m = 1; m <= 4; ++m) out.push_back({{"m", m}, {"delta_sq", to_json(dm[m])}});
  return {{"exact", dm.exact}, {"moments", out}};
}

json to_json(const MomentIdentityReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name}, {"m", c.m}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"identity", c.identity},
                      {"pass", c.pass}});
  return {{"all_pass", rep.all_pass()}, {"checks", checks}};
}

json to_json(const CumulantSet& cs) {
  return {{"sigma2", to_json(cs.sigma2)}, {"beta3", to_json(cs.beta3)},   {"kappa3", to_json(cs.kappa3)},
          {"kappa4", to_json(cs.kappa4)}, {"gamma", estimate_map(cs.gamma)}, {"zeta", estimate_map(cs.zeta)},
          {"provenance", to_string(cs.provenance)}, {"reps", cs.reps}, {"seed", cs.seed}};
}

json to_json(const ReducibilityReport& rep) {
  return {{"sigma2", rep.sigma2},         {"sigma_t2", rep.sigma_t2},       {"kappa", rep.kappa},
          {"delta3_sq", to_json(rep.delta3_sq)}, {"tolerance", rep.tolerance}, {"reducible", rep.reducible},
          {"provenance", to_string(rep.provenance)}, {"b", {{"points", vec(rep.b_points)}, {"values", vec(rep.b_values)}}}};
}

json to_json(const RhoResult& r) {
  return {{"rho", r.rho},           {"sup_abs", r.sup_abs},         {"t_at_sup", r.t_at_sup},
          {"grid_points", r.grid_points}, {"refinements", r.refinements}, {"relative_width", r.relative_width}};
}

json to_json(const ConditionReport& rep) {
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json cj{{"name", c.name}, {"implied", c.implied}, {"holds", c.holds}, {"note", c.note}};
    cj["given"] = c.given ? json(*c.given) : json();
    checks.push_back(cj);
  }
  return {{"N", rep.N},
          {"sigma_t2", rep.sigma_t2},
          {"sigma2", rep.sigma2},
          {"beta3", rep.beta3},
          {"g_r", rep.g_r},
          {"gamma_r", rep.gamma_r},
          {"zeta_s", rep.zeta_s},
          {"delta4_sq", rep.delta4_sq},
          {"rho", to_json(rep.rho)},
          {"rho_interval", {rep.rho_lower, rep.rho_upper}},
          {"delta3_sq", to_json(rep.delta3_sq)},
          {"nu", rep.nu},
          {"delta3_sq_scaled", rep.delta3_sq_scaled},
          {"params", {{"r", rep.params.r}, {"s", rep.params.s}, {"nu1", rep.params.nu1}, {"nu2", rep.params.nu2}}},
          {"checks", checks}};
}

json to_json(const AlphaBoundReport& rep) {
  json pts = json::array();
  for (const auto& p : rep.points)
    pts.push_back({{"t", p.t}, {"abs_alpha", p.abs_alpha}, {"bound", p.bound}, {"pass", p.pass}});
  return {{"N", rep.N},         {"beta3", rep.beta3}, {"t_max", rep.t_max}, {"subset_sizes", rep.subset_sizes},
          {"product_pass", rep.product_pass}, {"all_pass", rep.all_pass()}, {"points", pts}};
}

json to_json(const BallCount& bc) { return {{"count", bc.count}, {"center", vec(bc.center)}, {"exact", bc.exact}}; }

json to_json(const SymmetricPartition& p) {
  return {{"classes", p.classes.size()},
          {"covering", p.covering},
          {"sparse", p.sparse},
          {"min_within_distance", p.min_within_distance},
          {"members", p.classes}};
}

json to_json(const ExperimentResult& res) {
  json recs = json::array();
  for (const auto& r : res.records)
    recs.push_back({{"N", r.N},
                    {"reps", r.reps},
                    {"delta_normal", r.delta_normal},
                    {"delta_one", r.delta_one},
                    {"delta_two", r.delta_two},
                    {"mc_floor", r.mc_floor},
                    {"n_times_delta_two", r.n_times_delta_two},
                    {"kappa3", r.kappa3},
                    {"kappa4", r.kappa4},
                    {"sigma2", r.sigma2},
                    {"sigma_t2", r.sigma_t2},
                    {"mean", r.mean},
                    {"seed", r.seed}});
  const ExperimentSpec& s = res.spec;
  return {{"records", recs},
          {"rate_fit",
           {{"ok", res.rate.ok},
            {"slope", res.rate.slope},
            {"intercept", res.rate.intercept},
            {"slope_se", res.rate.slope_se},
            {"band", res.rate.band},
            {"used", res.rate.used},
            {"message", res.rate.message}}},
          {"metadata",
           {{"family", s.family},
            {"distribution", to_json(s.dist)},
            {"reps", s.reps},
            {"seed", s.seed},
            {"workers", s.workers},
            {"standardization", s.standardization == Standardization::empirical ? "empirical" : "theoretical"},
            {"sigma_source", s.sigma_source == SigmaSource::mc_oracle ? "mc_oracle" : "decomposition"},
            {"version", "0.1.0"},
            {"wall_seconds", res.wall_seconds}}}};
}

json to_json(const CounterexampleResult& res) {
  json levels = json::array();
  for (const auto& l : res.levels)
    levels.push_back({{"delta", l.delta},
                      {"p_interval", to_json(l.p_interval)},
                      {"normalized", l.normalized},
                      {"p_v", to_json(l.p_v)},
                      {"product", l.product}});
  return {{"N", res.N},         {"reps", res.reps},       {"seed", res.seed},
          {"odd_square", res.odd_square}, {"p_w1", to_json(res.p_w1)}, {"p_w1_times_n", res.p_w1_times_n},
          {"levels", levels}};
}

}  // namespace symstat
