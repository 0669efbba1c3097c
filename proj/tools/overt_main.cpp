#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "overt/benchmarks.hpp"
#include "overt/bounds1d.hpp"
#include "overt/reach.hpp"

using namespace overt;
using nlohmann::ordered_json;

namespace {

constexpr int kExitHolds = 0;
constexpr int kExitFails = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 3;

struct CommonConfig {
  std::string benchmark;
  std::string system_path;
  std::string controller_path;
  std::string property_path;
  std::string initial_text;
  std::string out_path;
  std::string csv_path;
  std::string config_path;
  std::vector<int> schedule;
  int horizon = -1;
  int segments = 2;
  double error_target = 0.0;  // 0 disables
  double epsilon = 1e-4;
  double xi = 1e-2;
  long max_nodes = 1000000;
  double time_limit = 0.0;  // 0 = unlimited
  uint64_t seed = 1;
  int jobs = 1;
  int samples = 1000;
  std::string reset = "interval";
  int reset_interval = 5;
  double reset_growth = 2.0;
};

Box parse_box(const std::string& text) {
  Box box;
  std::stringstream ss(text);
  std::string dim;
  while (std::getline(ss, dim, ';')) {
    double lo, hi;
    char comma;
    std::stringstream ds(dim);
    if (!(ds >> lo >> comma >> hi) || comma != ',')
      throw std::invalid_argument("box syntax is lo,hi;lo,hi;...");
    box.dims.emplace_back(lo, hi);
  }
  if (box.dims.empty()) throw std::invalid_argument("empty box");
  return box;
}

Property property_from_json(const nlohmann::json& j) {
  Property p;
  std::string mod = j.at("modality").get<std::string>();
  if (mod == "G") p.modality = Property::Modality::G;
  else if (mod == "F") p.modality = Property::Modality::F;
  else throw std::invalid_argument("property modality must be G or F");
  p.t_begin = j.at("from").get<int>();
  p.t_end = j.at("to").get<int>();
  for (const auto& ja : j.at("atoms")) {
    LinearAtom atom;
    for (const auto& [name, coef] : ja.at("coeffs").items())
      atom.coeffs[name] = coef.get<double>();
    std::string rel = ja.at("rel").get<std::string>();
    if (rel == ">=") atom.rel = Rel::Ge;
    else if (rel == "<=") atom.rel = Rel::Le;
    else throw std::invalid_argument("atom rel must be >= or <=");
    atom.rhs = ja.at("rhs").get<double>();
    p.atoms.push_back(std::move(atom));
  }
  p.validate();
  return p;
}

// Loads --config values as new defaults before the command line is parsed,
// so explicitly given flags always win. Relative file references inside the
// config resolve against the config's own directory.
void preload_config(CommonConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  std::string base;
  {
    size_t slash = path.find_last_of('/');
    if (slash != std::string::npos) base = path.substr(0, slash + 1);
  }
  auto rebase = [&](const std::string& key) {
    if (j.contains(key)) {
      std::string p = j.at(key).get<std::string>();
      if (!p.empty() && p[0] != '/') j[key] = base + p;
    }
  };
  rebase("controller");
  rebase("system");
  rebase("property");
  auto take = [&](const char* key, auto& slot) {
    if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
  };
  take("benchmark", c.benchmark);
  take("system", c.system_path);
  take("controller", c.controller_path);
  take("property", c.property_path);
  take("initial", c.initial_text);
  take("out", c.out_path);
  take("csv", c.csv_path);
  take("horizon", c.horizon);
  take("schedule", c.schedule);
  take("segments", c.segments);
  take("error_target", c.error_target);
  take("epsilon", c.epsilon);
  take("xi", c.xi);
  take("max_nodes", c.max_nodes);
  take("time_limit", c.time_limit);
  take("seed", c.seed);
  take("jobs", c.jobs);
  take("samples", c.samples);
  take("reset", c.reset);
  take("reset_interval", c.reset_interval);
  take("reset_growth", c.reset_growth);
}

struct LoadedInstance {
  SystemSpec system;
  std::optional<Network> controller;
  Box initial;
  Property property;
  int horizon;
  ConcretizationSchedule schedule;
  std::map<std::string, std::map<std::string, double>> derived;
};

LoadedInstance load_instance(const CommonConfig& c, bool need_property) {
  LoadedInstance out;
  if (!c.benchmark.empty() && !c.system_path.empty())
    throw std::invalid_argument("give either --benchmark or --system, not both");
  if (!c.benchmark.empty()) {
    BenchmarkInstance inst = get_system(c.benchmark);
    out.system = inst.system;
    out.initial = inst.initial;
    out.property = inst.property;
    out.horizon = inst.horizon;
    out.schedule = inst.default_schedule;
    out.derived = inst.derived_outputs;
  } else if (!c.system_path.empty()) {
    out.system = load_system(c.system_path);
    if (c.initial_text.empty())
      throw std::invalid_argument("--system requires --initial");
    if (need_property && c.property_path.empty())
      throw std::invalid_argument("--system requires --property");
    out.horizon = 0;
  } else {
    throw std::invalid_argument("need --benchmark or --system");
  }
  if (!c.initial_text.empty()) out.initial = parse_box(c.initial_text);
  if (out.initial.size() != out.system.state_dim())
    throw std::invalid_argument("initial box dimension mismatch");
  if (!c.property_path.empty()) {
    std::ifstream in(c.property_path);
    if (!in) throw std::invalid_argument("cannot open property " + c.property_path);
    out.property = property_from_json(nlohmann::json::parse(in));
  }
  if (c.horizon > 0) out.horizon = c.horizon;
  if (out.horizon <= 0) throw std::invalid_argument("need --horizon");
  if (!c.schedule.empty()) out.schedule.segments = c.schedule;
  if (out.schedule.segments.empty() || out.schedule.horizon() != out.horizon)
    out.schedule.segments.assign(out.horizon, 1);
  if (out.system.control_dim() > 0) {
    if (c.controller_path.empty()) throw std::invalid_argument("need --controller");
    out.controller = load_network(c.controller_path);
    if (out.controller->input_dim() != out.system.state_dim() ||
        out.controller->output_dim() != out.system.control_dim())
      throw std::invalid_argument("controller dimensions do not match the system");
  }
  return out;
}

ReachOptions reach_options(const CommonConfig& c) {
  ReachOptions opt;
  opt.approx.segments = c.segments;
  if (c.error_target > 0) opt.approx.rel_error_target = c.error_target;
  opt.approx.epsilon = c.epsilon;
  opt.approx.xi = c.xi;
  opt.solver.max_nodes = c.max_nodes;
  if (c.time_limit > 0) opt.solver.time_limit_s = c.time_limit;
  opt.jobs = c.jobs;
  return opt;
}

const char* status_name(Verdict::Status s) {
  switch (s) {
    case Verdict::Status::Holds: return "holds";
    case Verdict::Status::Fails: return "fails";
    case Verdict::Status::Inconclusive: return "inconclusive";
    case Verdict::Status::Unknown: return "unknown";
  }
  return "unknown";
}

int exit_code_for(Verdict::Status s) {
  switch (s) {
    case Verdict::Status::Holds: return kExitHolds;
    case Verdict::Status::Fails: return kExitFails;
    default: return kExitInconclusive;
  }
}

ordered_json boxes_json(const std::vector<TimedBox>& boxes) {
  ordered_json arr = ordered_json::array();
  for (const auto& tb : boxes) {
    ordered_json jb;
    jb["t"] = tb.t;
    ordered_json dims = ordered_json::array();
    for (const auto& d : tb.box.dims) dims.push_back({d.lo, d.hi});
    jb["box"] = std::move(dims);
    jb["kind"] = tb.symbolic ? "symbolic" : "concrete";
    arr.push_back(std::move(jb));
  }
  return arr;
}

ordered_json verdict_json(const Verdict& v) {
  ordered_json jv;
  jv["status"] = status_name(v.status);
  jv["reason"] = v.reason;
  return jv;
}

ordered_json counterexample_json(const Verdict& v) {
  if (v.counterexample.empty()) return nullptr;
  ordered_json jc;
  jc["states"] = v.counterexample;
  jc["real"] = v.counterexample_real;
  return jc;
}

ordered_json effort_json(const SolveEffort& e) {
  ordered_json j;
  j["mip_solves"] = e.mip_solves;
  j["lp_solves"] = e.lp_solves;
  j["bb_nodes"] = e.bb_nodes;
  return j;
}

void write_output(const std::string& path, const ordered_json& j) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("cannot write " + path);
}

void write_csv(const std::string& path, const std::vector<TimedBox>& boxes) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  out << "t,dim,lo,hi,kind\n";
  for (const auto& tb : boxes)
    for (size_t k = 0; k < tb.box.size(); ++k)
      out << tb.t << "," << k << "," << tb.box.dims[k].lo << "," << tb.box.dims[k].hi << ","
          << (tb.symbolic ? "symbolic" : "concrete") << "\n";
  if (!out) throw std::runtime_error("cannot write " + path);
}

int run_reach(const CommonConfig& c) {
  LoadedInstance inst = load_instance(c, true);
  inst.schedule.validate(inst.horizon);
  ReachOptions opt = reach_options(c);
  ReachResult rr = compute_reach_sets(inst.system, inst.controller ? &*inst.controller : nullptr,
                                      inst.initial, inst.schedule, opt);
  Verdict v;
  if (!rr.complete) {
    v.status = Verdict::Status::Unknown;
    v.reason = "solver limits hit before all reachable sets were computed";
  } else {
    Property prop = inst.property;
    prop.t_end = std::min(prop.t_end, inst.horizon);
    v = evaluate_property(rr.boxes, prop, inst.system.state_names);
  }

  ordered_json j;
  j["timesteps"] = boxes_json(rr.boxes);
  if (!inst.derived.empty()) {
    ordered_json jd;
    for (const auto& [name, coeffs] : inst.derived) {
      ordered_json arr = ordered_json::array();
      for (const auto& tb : rr.boxes) {
        double lo = 0, hi = 0;
        for (const auto& [sn, coef] : coeffs) {
          size_t k = std::find(inst.system.state_names.begin(), inst.system.state_names.end(),
                               sn) -
                     inst.system.state_names.begin();
          const Interval& d = tb.box.dims[k];
          lo += coef >= 0 ? coef * d.lo : coef * d.hi;
          hi += coef >= 0 ? coef * d.hi : coef * d.lo;
        }
        arr.push_back({{"t", tb.t}, {"range", {lo, hi}}});
      }
      jd[name] = std::move(arr);
    }
    j["derived"] = std::move(jd);
  }
  j["verdict"] = verdict_json(v);
  j["counterexample"] = nullptr;
  j["timing"] = effort_json(rr.effort);
  write_output(c.out_path, j);
  write_csv(c.csv_path, rr.boxes);
  std::cout << "reach: " << status_name(v.status) << " (" << v.reason << ")\n";
  return exit_code_for(v.status);
}

int run_feas(const CommonConfig& c, bool hybrid) {
  LoadedInstance inst = load_instance(c, true);
  ReachOptions opt = reach_options(c);
  Property prop = inst.property;
  prop.t_end = std::min(prop.t_end, inst.horizon);
  SolveEffort effort;
  Verdict v;
  const Network* net = inst.controller ? &*inst.controller : nullptr;
  if (hybrid) {
    if (prop.modality != Property::Modality::G)
      throw std::invalid_argument("hsfeas supports invariant (G) properties");
    ResetPolicy policy;
    if (c.reset == "never") policy.kind = ResetPolicy::Kind::Never;
    else if (c.reset == "interval") {
      policy.kind = ResetPolicy::Kind::FixedInterval;
      policy.interval = c.reset_interval;
    } else if (c.reset == "growth") {
      policy.kind = ResetPolicy::Kind::DiameterGrowth;
      policy.growth_factor = c.reset_growth;
    } else {
      throw std::invalid_argument("--reset must be never|interval|growth");
    }
    v = hs_feasibility_G(inst.system, net, inst.initial, inst.horizon, prop, policy, opt,
                         &effort);
  } else if (prop.modality == Property::Modality::G) {
    v = feasibility_G(inst.system, net, inst.initial, inst.horizon, prop, opt, &effort);
  } else {
    v = feasibility_F(inst.system, net, inst.initial, inst.horizon, prop, opt, &effort);
  }

  ordered_json j;
  j["timesteps"] = ordered_json::array();
  j["verdict"] = verdict_json(v);
  j["counterexample"] = counterexample_json(v);
  j["timing"] = effort_json(effort);
  write_output(c.out_path, j);
  std::cout << (hybrid ? "hsfeas: " : "feas: ") << status_name(v.status) << " (" << v.reason
            << ")\n";
  return exit_code_for(v.status);
}

int run_simulate(const CommonConfig& c) {
  LoadedInstance inst = load_instance(c, false);
  Network net = inst.controller ? *inst.controller
                                : Network::zeros(inst.system.state_dim(), 0);
  BenchmarkInstance bi;
  bi.system = inst.system;
  bi.initial = inst.initial;
  bi.horizon = inst.horizon;
  McResult mc = simulate_mc(bi, net, c.samples, c.seed, inst.horizon);
  ordered_json j;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  ordered_json arr = ordered_json::array();
  for (size_t t = 0; t < mc.hulls.size(); ++t) {
    ordered_json jb;
    jb["t"] = t;
    ordered_json dims = ordered_json::array();
    for (const auto& d : mc.hulls[t].dims) dims.push_back({d.lo, d.hi});
    jb["box"] = std::move(dims);
    arr.push_back(std::move(jb));
  }
  j["hulls"] = std::move(arr);
  write_output(c.out_path, j);
  std::cout << "simulate: " << c.samples << " rollouts over " << inst.horizon
            << " steps complete\n";
  return kExitHolds;
}

int run_approx(const CommonConfig& c, const std::string& expr_text,
               const std::string& domain_text) {
  Expr e = parse(expr_text);
  ApproxParams params;
  params.segments = c.segments;
  if (c.error_target > 0) params.rel_error_target = c.error_target;
  params.epsilon = c.epsilon;
  params.xi = c.xi;

  ordered_json j;
  auto vars = free_variables(e);
  auto unary = UnaryFn::from_expr(e);
  if (unary && vars.size() == 1 && e.child().is_var()) {
    // Single elementary function: emit breakpoints and closed forms.
    std::stringstream ds(domain_text);
    double lo, hi;
    char comma;
    if (!(ds >> lo >> comma >> hi) || comma != ',')
      throw std::invalid_argument("--domain syntax is lo,hi");
    std::string var = e.child().var_name();
    auto [ub, lb] = overapprox_unary(*unary, Interval(lo, hi), params);
    auto bound_json = [&](const PwlBound& b) {
      ordered_json jb;
      ordered_json pts = ordered_json::array();
      for (size_t i = 0; i < b.xs.size(); ++i) pts.push_back({b.xs[i], b.ys[i]});
      jb["breakpoints"] = std::move(pts);
      jb["closed_form"] = to_closed_form(b, var).to_string();
      return jb;
    };
    j["expr"] = expr_text;
    j["domain"] = {lo, hi};
    j["upper"] = bound_json(ub);
    j["lower"] = bound_json(lb);
  } else {
    // General expression: full rewrite/approximation pipeline over the
    // declared domains (name:lo:hi,name:lo:hi).
    DomainMap domains;
    std::stringstream ss(domain_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::replace(item.begin(), item.end(), ':', ' ');
      std::stringstream ds(item);
      std::string name;
      double lo, hi;
      if (!(ds >> name >> lo >> hi))
        throw std::invalid_argument("--domains syntax is name:lo:hi,name:lo:hi");
      domains[name] = Interval(lo, hi);
    }
    for (const auto& v : vars)
      if (!domains.count(v)) throw std::invalid_argument("no domain for variable " + v);
    Expr converted = convert_mul_div(e, domains, params.xi);
    RewriteResult rr = rewrite(converted);
    OverApproximation oa = approximate(rr, domains, params);
    j = ordered_json::parse(overapprox_to_json(oa));
    j["expr"] = expr_text;
  }
  write_output(c.out_path, j);
  if (c.out_path.empty()) std::cout << j.dump(2) << "\n";
  else std::cout << "approx: wrote " << c.out_path << "\n";
  return kExitHolds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sound piecewise-linear verification of neural-network controlled systems"};
  app.require_subcommand(1);

  CommonConfig c;
  std::string expr_text, domain_text;

  // The config file acts as a defaults layer underneath the flags.
  try {
    for (int i = 1; i < argc; ++i) {
      std::string arg = argv[i];
      if (arg == "--config" && i + 1 < argc) preload_config(c, argv[i + 1]);
      else if (arg.rfind("--config=", 0) == 0) preload_config(c, arg.substr(9));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  auto add_common = [&](CLI::App* sub, bool wants_solver) {
    sub->add_option("--benchmark", c.benchmark, "built-in system name");
    sub->add_option("--system", c.system_path, "system JSON file");
    sub->add_option("--controller", c.controller_path, "controller network JSON");
    sub->add_option("--property", c.property_path, "property JSON file");
    sub->add_option("--initial", c.initial_text, "initial box lo,hi;lo,hi;...");
    sub->add_option("--horizon", c.horizon, "number of timesteps");
    sub->add_option("--out", c.out_path, "output JSON path");
    sub->add_option("--config", c.config_path, "JSON config (flags win on conflict)");
    sub->add_option("--segments", c.segments, "PWL segments per convexity region");
    sub->add_option("--error-target", c.error_target, "relative error target (overrides --segments)");
    sub->add_option("--epsilon", c.epsilon, "bound safety gap");
    sub->add_option("--xi", c.xi, "log-shift for product elimination");
    sub->add_option("--seed", c.seed, "random seed");
    if (wants_solver) {
      sub->add_option("--max-nodes", c.max_nodes, "branch-and-bound node limit");
      sub->add_option("--time-limit", c.time_limit, "per-solve wall clock limit (s)");
      sub->add_option("--jobs", c.jobs, "concurrent solver instances");
    }
  };

  CLI::App* reach = app.add_subcommand("reach", "hybrid-symbolic reachable sets");
  add_common(reach, true);
  reach->add_option("--schedule", c.schedule, "concretization segment lengths")
      ->delimiter(',');
  reach->add_option("--csv", c.csv_path, "also write boxes as CSV");

  CLI::App* feas = app.add_subcommand("feas", "feasibility framing of the property");
  add_common(feas, true);

  CLI::App* hsfeas = app.add_subcommand("hsfeas", "feasibility with symbolic resets");
  add_common(hsfeas, true);
  hsfeas->add_option("--reset", c.reset, "never|interval|growth");
  hsfeas->add_option("--reset-interval", c.reset_interval, "steps between resets");
  hsfeas->add_option("--reset-growth", c.reset_growth, "diameter growth factor");

  CLI::App* approx = app.add_subcommand("approx", "piecewise-linear bounds for an expression");
  approx->add_option("--expr", expr_text, "expression, e.g. sin(x)")->required();
  approx->add_option("--domain", domain_text, "lo,hi (unary) or name:lo:hi,... (general)");
  approx->add_option("--n", c.segments, "segments per convexity region");
  approx->add_option("--error-target", c.error_target, "relative error target");
  approx->add_option("--epsilon", c.epsilon, "bound safety gap");
  approx->add_option("--xi", c.xi, "log-shift for product elimination");
  approx->add_option("--out", c.out_path, "output JSON path");

  CLI::App* simulate = app.add_subcommand("simulate", "exact closed-loop rollouts");
  add_common(simulate, false);
  simulate->add_option("--samples", c.samples, "number of rollouts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (reach->parsed()) return run_reach(c);
    if (feas->parsed()) return run_feas(c, false);
    if (hsfeas->parsed()) return run_feas(c, true);
    if (approx->parsed()) return run_approx(c, expr_text, domain_text);
    if (simulate->parsed()) return run_simulate(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
