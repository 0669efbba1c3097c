// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs through ctest as the gate for the whole toolkit.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "overt/benchmarks.hpp"
#include "overt/bounds1d.hpp"
#include "overt/mip.hpp"
#include "overt/reach.hpp"

using namespace overt;

namespace {

constexpr double kPi = 3.14159265358979323846;
int g_failures = 0;

void criterion(const std::string& name, bool pass, double seconds, double budget_s) {
  bool in_budget = seconds <= budget_s;
  bool ok = pass && in_budget;
  if (!ok) ++g_failures;
  std::printf("[%s] %-34s (%.2fs, budget %.0fs)%s\n", ok ? "PASS" : "FAIL", name.c_str(),
              seconds, budget_s, pass ? "" : " [check failed]");
  std::fflush(stdout);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double secs() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

const std::string kData = DATA_DIR;

// ---------------------------------------------------------------------------

bool golden_tanh() {
  ApproxParams p;
  p.segments = 2;
  p.epsilon = 0.0;
  auto [ub, lb] = overapprox_unary(UnaryFn{Expr::Un::Tanh, 0.0},
                                   Interval(-kPi / 2, kPi / 2), p);
  const double ux[] = {-1.5707963267948966, -0.7668186154783817, 0.0,
                       0.7937295874538862, 1.5707963267948966};
  const double uy[] = {-0.9171523356672744, -0.6450757227359059, 0.0,
                       0.7937295874441845, 0.9171523356672744};
  if (ub.xs.size() != 5 || lb.xs.size() != 5) return false;
  bool ok = true;
  for (int i = 0; i < 5; ++i) {
    ok = ok && std::fabs(ub.xs[i] - ux[i]) < 1e-6;
    ok = ok && std::fabs(ub.ys[i] - uy[i]) < 1e-6;
    // The published lower bound is the odd mirror image.
    ok = ok && std::fabs(lb.xs[i] + ux[4 - i]) < 1e-6;
    ok = ok && std::fabs(lb.ys[i] + uy[4 - i]) < 1e-6;
  }
  return ok;
}

struct OpCase {
  UnaryFn f;
  double lo, hi;
};

std::vector<OpCase> supported_cases() {
  return {{{Expr::Un::Sin, 0.0}, -6.0, 6.0},   {{Expr::Un::Cos, 0.0}, -6.0, 6.0},
          {{Expr::Un::Exp, 0.0}, -3.0, 3.0},   {{Expr::Un::Log, 0.0}, 0.05, 5.0},
          {{Expr::Un::Tanh, 0.0}, -3.0, 3.0},  {{Expr::Un::Pow, 2.0}, -3.0, 3.0},
          {{Expr::Un::Pow, 3.0}, -2.0, 2.0},   {{Expr::Un::COverX, 1.0}, 0.1, 4.0},
          {{Expr::Un::CPowX, 2.0}, -2.0, 2.0}};
}

bool optimality_residuals() {
  std::mt19937_64 rng(2468);
  bool ok = true;
  for (const auto& c : supported_cases()) {
    for (int trial = 0; trial < 50; ++trial) {
      std::uniform_real_distribution<double> mk(c.lo, c.hi);
      double a = mk(rng), b = mk(rng);
      if (a > b) std::swap(a, b);
      if (b - a < 0.05) b = a + 0.05;
      Interval d(a, b);
      auto cuts = c.f.inflections(d);
      std::vector<double> edges{d.lo};
      edges.insert(edges.end(), cuts.begin(), cuts.end());
      edges.push_back(d.hi);
      ScalarFn fn = scalar_fn(c.f);
      for (size_t r = 0; r + 1 < edges.size(); ++r) {
        Interval region(edges[r], edges[r + 1]);
        if (region.width() < 1e-4) continue;
        bool convex = c.f.second(region.mid()) >= 0.0;
        if (convex) {
          PwlBound sec = optimize_secant_breakpoints(fn, region, 3);
          ok = ok && secant_optimality_residual(fn, sec) < 1e-6;
        } else {
          PwlBound tan = optimize_tangent_breakpoints(fn, region, 3);
          ok = ok && tangent_optimality_residual(fn, tan) < 1e-6;
        }
        if (!ok) return false;
      }
    }
  }
  // Midpoint tangency is the per-segment area minimizer on concave pieces.
  std::uniform_real_distribution<double> mk(0.3, 2.6);  // sin concave on (0, pi)
  for (int trial = 0; trial < 20; ++trial) {
    double a = mk(rng), b = mk(rng);
    if (a > b) std::swap(a, b);
    if (b - a < 0.05) b = a + 0.05;
    double mid = 0.5 * (a + b);
    auto area = [&](double alpha) {
      return (std::cos(alpha) * (mid - alpha) + std::sin(alpha)) * (b - a);
    };
    std::uniform_real_distribution<double> pick(a, b);
    for (int i = 0; i < 50; ++i) {
      double alpha = pick(rng);
      ok = ok && area(mid) <= area(alpha) + 1e-12;
      if (std::fabs(alpha - mid) > 1e-3) ok = ok && area(mid) < area(alpha);
      if (!ok) return false;
    }
  }
  return ok;
}

bool bound_soundness() {
  std::mt19937_64 rng(1357);
  ApproxParams p;
  p.epsilon = 1e-4;
  for (const auto& c : supported_cases()) {
    for (int trial = 0; trial < 50; ++trial) {
      std::uniform_real_distribution<double> mk(c.lo, c.hi);
      double a = mk(rng), b = mk(rng);
      if (a > b) std::swap(a, b);
      if (b - a < 1e-3) b = a + 1e-3;
      p.segments = trial % 3 + 1;
      auto [ub, lb] = overapprox_unary(c.f, Interval(a, b), p);
      for (int i = 0; i <= 10000; ++i) {
        double x = a + (b - a) * i / 10000.0;
        double fx = c.f.eval(x);
        if (!(lb.value(x) < fx && fx < ub.value(x))) return false;
      }
    }
  }
  return true;
}

bool closed_form_fidelity() {
  std::mt19937_64 rng(9753);
  ApproxParams p;
  p.epsilon = 0.0;
  for (const auto& c : supported_cases()) {
    for (int trial = 0; trial < 6; ++trial) {
      std::uniform_real_distribution<double> mk(c.lo, c.hi);
      double a = mk(rng), b = mk(rng);
      if (a > b) std::swap(a, b);
      if (b - a < 0.05) b = a + 0.05;
      p.segments = trial % 3 + 1;
      auto [ub, lb] = overapprox_unary(c.f, Interval(a, b), p);
      for (const PwlBound& bound : {ub, lb}) {
        Expr g = to_closed_form(bound, "x");
        for (size_t j = 0; j < bound.xs.size(); ++j)
          if (g.evaluate({{"x", bound.xs[j]}}) != bound.ys[j]) return false;  // exact
        for (int i = 0; i <= 1000; ++i) {
          double x = a + (b - a) * i / 1000.0;
          if (std::fabs(g.evaluate({{"x", x}}) - bound.value(x)) > 1e-9) return false;
        }
      }
    }
  }
  return true;
}

Network random_relu_net(std::mt19937_64& rng, const std::vector<size_t>& dims) {
  std::normal_distribution<double> w(0.0, 0.9);
  Network net;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    layer.weights.assign(dims[l + 1], std::vector<double>(dims[l]));
    layer.bias.assign(dims[l + 1], 0.0);
    for (auto& row : layer.weights)
      for (double& x : row) x = w(rng);
    for (double& bb : layer.bias) bb = 0.4 * w(rng);
    layer.activation = l + 2 == dims.size() ? Activation::Linear : Activation::Relu;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

// Enumerates every relu phase pattern and solves the pinned LP of each.
double brute_force_extreme(const Network& net, const std::vector<Interval>& box,
                           bool maximize) {
  size_t total_relus = 0;
  for (const auto& l : net.layers)
    if (l.activation == Activation::Relu) total_relus += l.out_dim();
  double best = maximize ? -1e300 : 1e300;
  for (size_t pattern = 0; pattern < (size_t{1} << total_relus); ++pattern) {
    MipProblem p;
    std::vector<LinExpr> cur;
    for (size_t i = 0; i < box.size(); ++i)
      cur.push_back(LinExpr::of_var(p.add_var("x", box[i].lo, box[i].hi)));
    size_t bit = 0;
    for (const auto& layer : net.layers) {
      std::vector<LinExpr> next(layer.out_dim());
      for (size_t i = 0; i < layer.out_dim(); ++i) {
        LinExpr z(layer.bias[i]);
        for (size_t k = 0; k < layer.in_dim(); ++k) {
          LinExpr t = cur[k];
          t *= layer.weights[i][k];
          z += t;
        }
        if (layer.activation == Activation::Linear) {
          next[i] = std::move(z);
          continue;
        }
        bool active = (pattern >> bit++) & 1;
        if (active) {
          Interval zi = p.activity(z);
          int y = p.add_var("h", std::max(0.0, zi.lo), std::max(0.0, zi.hi));
          LinExpr tie = LinExpr::of_var(y);
          tie -= z;
          p.add_con(tie, Rel::Eq, 0.0);
          p.add_con(z, Rel::Ge, 0.0);
          next[i] = LinExpr::of_var(y);
        } else {
          p.add_con(z, Rel::Le, 0.0);
          next[i] = LinExpr(0.0);
        }
      }
      cur = std::move(next);
    }
    p.objective = cur[0];
    p.maximize = maximize;
    SolveResult r = optimize(p);
    if (r.status != SolveResult::Status::Optimal) continue;
    best = maximize ? std::max(best, r.primal) : std::min(best, r.primal);
  }
  return best;
}

bool mip_encoding_oracle() {
  std::mt19937_64 rng(86420);
  const std::vector<std::vector<size_t>> shapes{{2, 6, 1}, {2, 4, 4, 1}, {3, 8, 1},
                                                {1, 10, 1}, {2, 12, 1}};
  for (int trial = 0; trial < 20; ++trial) {
    Network net = random_relu_net(rng, shapes[trial % shapes.size()]);
    std::vector<Interval> box;
    std::uniform_real_distribution<double> mk(-1.5, 0.0);
    for (size_t i = 0; i < net.input_dim(); ++i) {
      double lo = mk(rng);
      box.emplace_back(lo, lo + 1.0 + std::fabs(mk(rng)));
    }
    MipBuilder b;
    std::vector<LinExpr> ins;
    for (size_t i = 0; i < box.size(); ++i)
      ins.push_back(LinExpr::of_var(b.add_cont("x", box[i])));
    LinExpr out = b.encode_network(net, box, ins, "net")[0];
    for (bool maximize : {true, false}) {
      MipProblem p = b.problem;
      p.objective = out;
      p.maximize = maximize;
      SolveResult r = optimize(p);
      if (r.status != SolveResult::Status::Optimal) return false;
      double oracle = brute_force_extreme(net, box, maximize);
      if (std::fabs(r.primal - oracle) >= 1e-6) return false;
      if (maximize && r.bound < r.primal - 1e-12) return false;
      if (!maximize && r.bound > r.primal + 1e-12) return false;
    }
  }
  return true;
}

bool rewrite_exactness() {
  std::mt19937_64 rng(7777);
  for (const auto& name : benchmark_names()) {
    BenchmarkInstance inst = get_system(name);
    DomainMap seed;
    for (size_t k = 0; k < inst.system.state_dim(); ++k)
      seed[inst.system.state_names[k]] = inst.initial.dims[k];
    for (const auto& u : inst.system.control_names) seed[u] = Interval(-2.0, 2.0);

    auto resolved = inst.system.resolved_updates();
    for (size_t k = 0; k < resolved.size(); ++k) {
      Expr converted = convert_mul_div(resolved[k], seed, 1e-2, 2e-4);
      RewriteResult rr = rewrite(converted);
      for (int s = 0; s < 1000; ++s) {
        Binding b;
        for (const auto& [var, dom] : seed)
          b[var] = std::uniform_real_distribution<double>(dom.lo, dom.hi)(rng);
        double direct = resolved[k].evaluate(b);
        Binding chain = b;
        for (const auto& c : rr.constraints) chain[c.var] = c.rhs.evaluate(chain);
        double via = rr.out.empty() ? direct : chain.at(rr.out);
        if (std::fabs(via - direct) > 1e-12 * std::max(1.0, std::fabs(direct)))
          return false;
      }
    }
  }
  return true;
}

bool reach_soundness() {
  BenchmarkInstance inst = get_system("pendulum");
  Network net = load_network(kData + "/controllers/pendulum_pd_8x8.json");
  ReachOptions opt;
  opt.approx.segments = 2;

  ConcretizationSchedule hybrid{{5, 5}};
  ReachResult hy = compute_reach_sets(inst.system, &net, inst.initial, hybrid, opt);
  if (!hy.complete || hy.boxes.size() != 10) return false;

  McResult mc = simulate_mc(inst, net, 10000, 20240815, 10);
  for (const auto& tb : hy.boxes)
    if (!tb.box.contains(mc.hulls[tb.t], 0.0)) return false;

  ConcretizationSchedule ones{std::vector<int>(10, 1)};
  ReachResult cv = compute_reach_sets(inst.system, &net, inst.initial, ones, opt);
  if (!cv.complete) return false;
  for (int t : {5, 10}) {
    const Box& sym = hy.boxes[t - 1].box;
    const Box& conc = cv.boxes[t - 1].box;
    for (size_t k = 0; k < sym.size(); ++k) {
      if (sym.dims[k].lo < conc.dims[k].lo - 1e-9) return false;
      if (sym.dims[k].hi > conc.dims[k].hi + 1e-9) return false;
    }
  }
  return true;
}

bool framing_consistency() {
  Network pd = load_network(kData + "/controllers/pendulum_pd_8x8.json");
  Network zero2 = Network::zeros(2, 1);
  Network tora_net = load_network(kData + "/controllers/tora_4x8x8x1.json");
  Network acc_net = load_network(kData + "/controllers/acc_6x8x1.json");
  ReachOptions opt;
  opt.approx.segments = 2;

  struct Desk {
    std::string bench;
    const Network* net;
    int horizon;
    std::vector<int> schedule;
  };
  const std::vector<Desk> desks{{"pendulum", &pd, 10, {5, 5}},
                                {"pendulum", &pd, 5, {5}},
                                {"pendulum", &zero2, 5, {1, 1, 1, 1, 1}},
                                {"tora", &tora_net, 4, {2, 2}},
                                {"acc", &acc_net, 3, {1, 1, 1}}};
  for (const auto& d : desks) {
    BenchmarkInstance inst = get_system(d.bench);
    Property p = inst.property;
    p.t_end = std::min(p.t_end, d.horizon);
    ConcretizationSchedule sched{d.schedule};
    ReachResult rr = compute_reach_sets(inst.system, d.net, inst.initial, sched, opt);
    if (!rr.complete) return false;
    Verdict reach = evaluate_property(rr.boxes, p, inst.system.state_names);
    if (reach.status != Verdict::Status::Holds) return false;  // precondition
    Verdict feas = feasibility_G(inst.system, d.net, inst.initial, d.horizon, p, opt);
    if (feas.status != Verdict::Status::Holds) return false;
    ResetPolicy never;
    never.kind = ResetPolicy::Kind::Never;
    Verdict hs = hs_feasibility_G(inst.system, d.net, inst.initial, d.horizon, p, never, opt);
    if (hs.status != feas.status) return false;
  }
  return true;
}

bool qualitative_outcomes() {
  BenchmarkInstance inst = get_system("pendulum");
  Network net = load_network(kData + "/controllers/pendulum_pd_8x8.json");
  Property p = inst.property;
  p.t_end = 10;

  // (a) loose pure-concrete chaining cannot prove what the hybrid run can.
  ReachOptions loose;
  loose.approx.segments = 1;
  loose.approx.epsilon = 0.01;
  ConcretizationSchedule ones{std::vector<int>(10, 1)};
  ReachResult lr = compute_reach_sets(inst.system, &net, inst.initial, ones, loose);
  if (!lr.complete) return false;
  Verdict lv = evaluate_property(lr.boxes, p, inst.system.state_names);
  if (lv.status != Verdict::Status::Inconclusive) return false;

  ReachOptions tight;
  tight.approx.segments = 2;
  ConcretizationSchedule hybrid{{5, 5}};
  ReachResult hr = compute_reach_sets(inst.system, &net, inst.initial, hybrid, tight);
  if (!hr.complete) return false;
  Verdict hv = evaluate_property(hr.boxes, p, inst.system.state_names);
  if (hv.status != Verdict::Status::Holds) return false;

  // (b) reach boxes disjoint from the goal adjudicate as never-reaches.
  BenchmarkInstance car = get_system("car");
  Network car_net = load_network(kData + "/controllers/car_4x8x8x2.json");
  Property goal = car.property;
  goal.t_end = 4;
  ConcretizationSchedule sched{{2, 2}};
  ReachOptions opt;
  opt.approx.segments = 2;
  ReachResult cr = compute_reach_sets(car.system, &car_net, car.initial, sched, opt);
  if (!cr.complete) return false;
  Verdict cv = evaluate_property(cr.boxes, goal, car.system.state_names);
  return cv.status == Verdict::Status::Fails &&
         cv.reason.find("never") != std::string::npos;
}

bool determinism() {
  auto run = [&](const std::string& args, const std::string& out) {
    std::string cmd = std::string(OVERT_BIN) + " " + args + " --out " + out +
                      " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str())) == 0;
  };
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::string base = "reach --benchmark pendulum --controller " + kData +
                     "/controllers/pendulum_pd_8x8.json --horizon 6 --schedule 3,3 --seed 11";
  if (!run(base, "/tmp/acc_det_a.json") || !run(base, "/tmp/acc_det_b.json")) return false;
  if (slurp("/tmp/acc_det_a.json") != slurp("/tmp/acc_det_b.json")) return false;
  std::string feas = "feas --benchmark pendulum --controller " + kData +
                     "/controllers/pendulum_pd_8x8.json --horizon 6 --seed 11";
  if (!run(feas, "/tmp/acc_det_c.json") || !run(feas, "/tmp/acc_det_d.json")) return false;
  return slurp("/tmp/acc_det_c.json") == slurp("/tmp/acc_det_d.json");
}

void run_criterion(const std::string& name, double budget_s,
                   const std::function<bool()>& body) {
  Timer t;
  bool pass = false;
  try {
    pass = body();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "  exception in %s: %s\n", name.c_str(), e.what());
    pass = false;
  }
  criterion(name, pass, t.secs(), budget_s);
}

}  // namespace

int main() {
  run_criterion("golden-tanh-bound", 1.0, golden_tanh);
  run_criterion("optimality-residuals", 60.0, optimality_residuals);
  run_criterion("bound-soundness", 60.0, bound_soundness);
  run_criterion("closed-form-fidelity", 60.0, closed_form_fidelity);
  run_criterion("mip-encoding-oracle", 120.0, mip_encoding_oracle);
  run_criterion("rewrite-exactness", 60.0, rewrite_exactness);
  run_criterion("reachability-soundness", 600.0, reach_soundness);
  run_criterion("framing-consistency", 300.0, framing_consistency);
  run_criterion("qualitative-outcomes", 300.0, qualitative_outcomes);
  run_criterion("determinism", 60.0, determinism);

  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
