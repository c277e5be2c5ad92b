// Command-line front end: each subcommand reads a JSON spec and writes JSON or CSV.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "symstat/error.hpp"
#include "symstat/json_io.hpp"

using namespace symstat;

namespace {

struct Common {
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::size_t> reps;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("spec", c.spec, "JSON spec file")->required()->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output path; .csv selects CSV, anything else JSON (default: JSON on stdout)");
  app->add_option("--seed", c.seed, "master seed (overrides the spec)");
  app->add_option("--workers", c.workers, "worker threads (overrides the spec)");
  app->add_option("--reps", c.reps, "replications (overrides the spec)");
}

json load(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in, nullptr, true, true);
}

bool wants_csv(const Common& c) { return c.out.size() >= 4 && c.out.substr(c.out.size() - 4) == ".csv"; }

void emit(const Common& c, const json& j, const std::string& csv) {
  const std::string text = wants_csv(c) ? csv : j.dump(2) + "\n";
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(c.out);
  if (!os) throw Error(ErrorKind::invalid_argument, "cannot write " + c.out);
  os << text;
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int workers_of(const Common& c, const json& spec) { return c.workers.value_or(spec.value("workers", 1)); }
std::uint64_t seed_of(const Common& c, const json& spec) {
  return c.seed.value_or(spec.value("seed", std::uint64_t{0}));
}

// {"mode": "exact"} or {"mode": "mc", "reps": n}; --reps forces MC.
ExpectMode mode_of(const Common& c, const json& spec) {
  const std::string mode = spec.value("mode", std::string(c.reps ? "mc" : "exact"));
  if (mode == "exact") return ExpectMode::exact();
  if (mode != "mc") throw Error(ErrorKind::invalid_argument, "mode must be exact or mc");
  return ExpectMode::mc(c.reps.value_or(spec.value("reps", std::size_t{100000})), seed_of(c, spec));
}

HoeffdingDecomposition decomposition_of(const json& spec, const SymmetricStatistic& T, const Distribution& d) {
  if (d.is_finite() && !spec.value("use_quadratic_form", false)) return decompose(T, d);
  return decompose_quadratic(T, d, quadrature_from_json(spec.value("quadrature", json())));
}

void cmd_decompose(const Common& c) {
  const json spec = load(c.spec);
  const SymmetricStatistic T = statistic_from_json(spec.at("statistic"));
  const Distribution d = distribution_from_json(spec.at("distribution"));
  const HoeffdingDecomposition dec = decomposition_of(spec, T, d);
  json out{{"decomposition", to_json(dec)}};
  if (d.is_finite() && !spec.value("use_quadratic_form", false)) {
    out["delta_moments"] = to_json(delta_moments(T, d, ExpectMode::exact()));
    out["identities"] = to_json(verify_moment_identities(T, d));
  } else if (c.reps) {
    out["delta_moments"] = to_json(delta_moments(T, d, ExpectMode::mc(*c.reps, seed_of(c, spec))));
  }
  std::ostringstream csv;
  csv << "k,sigma_k2\n";
  for (std::size_t k = 0; k < dec.component_variance.size(); ++k)
    csv << k << "," << g17(dec.component_variance[k]) << "\n";
  emit(c, out, csv.str());
}

void cmd_cumulants(const Common& c) {
  const json spec = load(c.spec);
  const SymmetricStatistic T = statistic_from_json(spec.at("statistic"));
  const Distribution d = distribution_from_json(spec.at("distribution"));
  const HoeffdingDecomposition dec = decomposition_of(spec, T, d);
  const ExpectMode mode = mode_of(c, spec);
  CumulantOptions opts;
  if (spec.contains("orders")) opts.orders = spec.at("orders").get<std::vector<double>>();
  opts.workers = workers_of(c, spec);
  const CumulantSet cs = cumulants(dec, d, mode, opts);
  const ReducibilityReport red =
      reducibility(dec, d, mode, spec.value("tolerance", kReducibleTolerance), opts.workers);
  json out{{"cumulants", to_json(cs)}, {"reducibility", to_json(red)}};
  std::ostringstream csv;
  csv << "name,value,std_error\n";
  auto row = [&](const std::string& name, const Estimate& e) {
    csv << name << "," << g17(e.value) << "," << g17(e.std_error) << "\n";
  };
  row("sigma2", cs.sigma2);
  row("beta3", cs.beta3);
  row("kappa3", cs.kappa3);
  row("kappa4", cs.kappa4);
  for (const auto& [t, e] : cs.gamma) row("gamma_" + g17(t), e);
  for (const auto& [t, e] : cs.zeta) row("zeta_" + g17(t), e);
  row("delta3_sq", red.delta3_sq);
  emit(c, out, csv.str());
}

void cmd_conditions(const Common& c) {
  const json spec = load(c.spec);
  const SymmetricStatistic T = statistic_from_json(spec.at("statistic"));
  const Distribution d = distribution_from_json(spec.at("distribution"));
  const HoeffdingDecomposition dec = decomposition_of(spec, T, d);
  const ConditionReport rep =
      check_conditions(dec, d, condition_params_from_json(spec.value("params", json())), mode_of(c, spec),
                       workers_of(c, spec));
  std::ostringstream csv;
  csv << "name,implied,given,holds\n";
  for (const auto& ck : rep.checks)
    csv << ck.name << "," << g17(ck.implied) << "," << (ck.given ? g17(*ck.given) : "") << ","
        << (ck.holds ? "true" : "false") << "\n";
  emit(c, to_json(rep), csv.str());
}

void cmd_expand(const Common& c) {
  const json spec = load(c.spec);
  const Expansion e{spec.at("N").get<int>(), spec.value("kappa3", 0.0), spec.value("kappa4", 0.0),
                    ExpansionOrder::two};
  const json grid = spec.value("grid", json::object());
  const double lo = grid.value("from", -4.0), hi = grid.value("to", 4.0);
  const int points = grid.value("points", 161);
  std::ostringstream csv;
  csv << "x,normal,one_term,two_term\n";
  json rows = json::array();
  for (int i = 0; i < points; ++i) {
    const double x = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    const double g0 = evaluate(e.with_order(ExpansionOrder::zero), x);
    const double g1 = evaluate(e.with_order(ExpansionOrder::one), x);
    const double g2 = evaluate(e, x);
    csv << g17(x) << "," << g17(g0) << "," << g17(g1) << "," << g17(g2) << "\n";
    rows.push_back({{"x", x}, {"normal", g0}, {"one_term", g1}, {"two_term", g2}});
  }
  json out{{"N", e.N}, {"kappa3", e.kappa3}, {"kappa4", e.kappa4}, {"derivative_bound", derivative_bound(e)},
           {"table", rows}};
  if (spec.contains("transform_t")) {
    json ft = json::array();
    for (double t : spec.at("transform_t").get<std::vector<double>>()) {
      const auto z = fourier_transform(e, t);
      ft.push_back({{"t", t}, {"re", z.real()}, {"im", z.imag()}});
    }
    out["transform"] = ft;
  }
  emit(c, out, csv.str());
}

void cmd_simulate(const Common& c) {
  const json spec = load(c.spec);
  ExperimentSpec es = experiment_from_json(spec);
  if (c.seed) es.seed = *c.seed;
  if (c.workers) es.workers = *c.workers;
  if (c.reps) es.reps = *c.reps;
  const ExperimentResult res = run(es);
  std::ostringstream csv;
  write_csv(res, csv);
  emit(c, to_json(res), csv.str());
}

void cmd_counterexample(const Common& c) {
  const json spec = load(c.spec);
  std::vector<int> ns;
  if (spec.at("N").is_array()) {
    ns = spec.at("N").get<std::vector<int>>();
  } else {
    ns = {spec.at("N").get<int>()};
  }
  const auto deltas = spec.value("deltas", std::vector<double>{0.5});
  const std::size_t reps = c.reps.value_or(spec.value("reps", std::size_t{1000000}));
  const bool allow = spec.value("allow_non_square", false);
  json out = json::array();
  std::ostringstream csv;
  csv << "N,reps,delta,p_interval,p_interval_se,normalized,p_w1,p_w1_times_n,p_v,product,seed\n";
  for (int N : ns) {
    const CounterexampleResult r = counterexample_probe(N, deltas, reps, seed_of(c, spec), workers_of(c, spec), allow);
    if (!r.odd_square) std::cerr << "warning: N = " << N << " is not the square of an odd integer\n";
    out.push_back(to_json(r));
    for (const auto& l : r.levels)
      csv << N << "," << reps << "," << g17(l.delta) << "," << g17(l.p_interval.value) << ","
          << g17(l.p_interval.std_error) << "," << g17(l.normalized) << "," << g17(r.p_w1.value) << ","
          << g17(r.p_w1_times_n) << "," << g17(l.p_v.value) << "," << g17(l.product) << "," << r.seed << "\n";
  }
  emit(c, out, csv.str());
}

void cmd_kleitman(const Common& c) {
  const json spec = load(c.spec);
  const SignedSumInstance inst = instance_from_json(spec);
  const BallCount bc = max_ball_count(inst);
  const std::uint64_t bound = kleitman_bound(inst.size());
  json out{{"n", inst.size()}, {"dimension", inst.dimension()}, {"r", inst.r}, {"ball", to_json(bc)},
           {"bound", bound}, {"within_bound", bc.count <= bound}};
  std::ostringstream csv;
  csv << "n,dimension,count,bound,exact,classes,sparse\n";
  std::string classes, sparse;
  if (spec.value("partition", true) && inst.size() <= kMaxPartitionVectors) {
    const SymmetricPartition p = symmetric_partition(inst);
    out["partition"] = to_json(p);
    classes = std::to_string(p.classes.size());
    sparse = p.sparse && p.covering ? "true" : "false";
  }
  csv << inst.size() << "," << inst.dimension() << "," << bc.count << "," << bound << ","
      << (bc.exact ? "true" : "false") << "," << classes << "," << sparse << "\n";
  emit(c, out, csv.str());
}

void cmd_charfn(const Common& c) {
  const json spec = load(c.spec);
  json out = json::object();
  std::optional<CharFunction> cf;
  std::optional<HoeffdingDecomposition> dec;
  const json source = spec.value("cf", json{{"kind", "normal"}});
  const std::string kind = source.value("kind", std::string("normal"));
  if (kind == "normal") {
    cf = normal_cf(source.value("mean", 0.0), source.value("sd", 1.0));
  } else if (kind == "linear_part") {
    const SymmetricStatistic T = statistic_from_json(source.at("statistic"));
    const Distribution d = distribution_from_json(source.at("distribution"));
    dec = decomposition_of(source, T, d);
    cf = linear_part_cf(*dec, d);
  } else {
    throw Error(ErrorKind::invalid_argument, "cf kind must be normal or linear_part");
  }
  out["source"] = to_string(cf->source);

  if (spec.contains("rho")) {
    const json& r = spec.at("rho");
    RhoOptions ro;
    ro.base_points = r.value("base_points", ro.base_points);
    out["rho"] = to_json(cramer_rho(*cf, r.at("a").get<double>(), r.at("b").get<double>(), ro));
  }
  if (spec.contains("smoothing")) {
    const json& s = spec.at("smoothing");
    const int k = s.value("k", 2);
    const double a = s.contains("a") ? s.at("a").get<double>() : calibrate_smoothing_scale(k);
    const SmoothingKernel K(a, k);
    out["smoothing"] = {{"a", a}, {"k", k}, {"c", K.c()}, {"mass_unit_interval", K.mass(1.0)}};
  }
  if (dec && spec.value("alpha_bound", false)) out["alpha_bound"] = to_json(verify_alpha_bound(*dec));

  const json table = spec.value("table", json{{"from", 0.0}, {"to", 10.0}, {"points", 101}});
  const double lo = table.value("from", 0.0), hi = table.value("to", 10.0);
  const int points = table.value("points", 101);
  std::ostringstream csv;
  csv << "t,abs_cf,bound\n";
  json rows = json::array();
  const double n = dec ? dec->N : 1.0;
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    const double a = std::abs((*cf)(t));
    // 1 - t^2/4N, the decay envelope for the normalised linear summand.
    const double bound = 1.0 - t * t / (4.0 * n);
    csv << g17(t) << "," << g17(a) << "," << g17(bound) << "\n";
    rows.push_back({{"t", t}, {"abs_cf", a}, {"bound", bound}});
  }
  out["table"] = rows;
  emit(c, out, csv.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hoeffding decompositions, Edgeworth expansions and Monte Carlo experiments for symmetric statistics"};
  app.require_subcommand(1);
  struct Entry {
    const char* name;
    const char* help;
    void (*fn)(const Common&);
  };
  const Entry entries[] = {
      {"decompose", "Hoeffding decomposition, difference moments and variance identities", cmd_decompose},
      {"cumulants", "sigma^2, beta3, kappa3, kappa4, gamma_t, zeta_t and reducibility", cmd_cumulants},
      {"conditions", "moment, difference, Cramer and non-reducibility conditions", cmd_conditions},
      {"expand", "tabulate the normal, one-term and two-term approximations", cmd_expand},
      {"simulate", "Kolmogorov distances across N by Monte Carlo", cmd_simulate},
      {"counterexample", "probabilities behind the failing example", cmd_counterexample},
      {"kleitman", "signed-sum concentration and symmetric partitions", cmd_kleitman},
      {"charfn", "characteristic functions, rho(a, b), smoothing kernel", cmd_charfn},
  };
  std::vector<Common> opts(std::size(entries));
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    subs.push_back(app.add_subcommand(entries[i].name, entries[i].help));
    add_common(subs.back(), opts[i]);
  }
  CLI11_PARSE(app, argc, argv);
  try {
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) entries[i].fn(opts[i]);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
