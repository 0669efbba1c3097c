#include <cmath>
#include <random>

#include "doctest.h"
#include "overt/overapprox.hpp"

using namespace overt;

namespace {

ApproxParams plain(int n, double eps = 0.0) {
  ApproxParams p;
  p.segments = n;
  p.epsilon = eps;
  return p;
}

SystemSpec pendulum_spec() {
  SystemSpec s;
  s.name = "pendulum";
  s.state_names = {"x1", "x2"};
  s.control_names = {"u"};
  s.updates = {parse("x1 + dt * x2"),
               parse("x2 + dt * (g / l * sin(x1) + u / (m * l^2))")};
  s.params = {{"m", 0.5}, {"l", 0.5}, {"g", 1.0}, {"dt", 0.1}};
  return s;
}

}  // namespace

TEST_CASE("rewrite reproduces the worked chain structure") {
  RewriteResult rr = rewrite(parse("sin(x^2 + y - log(z))"));
  REQUIRE(rr.constraints.size() == 5);
  // v1/v2 and v5/v6 and v9/v10 are reserved for bounds; equalities land on
  // v3, v4, v7, v8, v11.
  CHECK(rr.constraints[0].var == "v3");
  CHECK(rr.constraints[0].rhs.to_string() == "x ^ 2");
  CHECK(rr.constraints[1].var == "v4");
  CHECK(rr.constraints[1].rhs.to_string() == "v3 + y");
  CHECK(rr.constraints[2].var == "v7");
  CHECK(rr.constraints[2].rhs.to_string() == "log(z)");
  CHECK(rr.constraints[3].var == "v8");
  CHECK(rr.constraints[3].rhs.to_string() == "v4 - v7");
  CHECK(rr.constraints[4].var == "v11");
  CHECK(rr.constraints[4].rhs.to_string() == "sin(v8)");
  CHECK(rr.out == "v11");
  CHECK(rr.bound_slots.at("v3") == std::pair<std::string, std::string>("v1", "v2"));
  CHECK(rr.bound_slots.at("v7") == std::pair<std::string, std::string>("v5", "v6"));
  CHECK(rr.bound_slots.at("v11") == std::pair<std::string, std::string>("v9", "v10"));
}

TEST_CASE("rewrite base cases") {
  RewriteResult bare = rewrite(parse("x"));
  CHECK(bare.out == "x");
  CHECK(bare.constraints.empty());

  RewriteResult affine = rewrite(parse("2 * x + 3"));
  REQUIRE(affine.constraints.size() == 1);
  CHECK(affine.constraints[0].var == "v1");
  CHECK(affine.out == "v1");
  CHECK(affine.constraints[0].rhs.evaluate({{"x", 2.0}}) == 7.0);
}

TEST_CASE("rewrite chains evaluate exactly") {
  std::mt19937_64 rng(11);
  const char* exprs[] = {
      "sin(x^2 + y - log(z))",
      "tanh(x) + cos(y) * 0.5 - relu(z - 1)",
      "max(x, min(y, z)) + exp(0.3 * x)",
      "2 ^ (x - y) + 1 / z",
  };
  std::uniform_real_distribution<double> u(0.4, 1.8);
  for (const char* s : exprs) {
    Expr e = parse(s);
    RewriteResult rr = rewrite(e);
    for (int i = 0; i < 200; ++i) {
      Binding b{{"x", u(rng)}, {"y", u(rng)}, {"z", u(rng)}};
      Binding chain = b;
      for (const auto& c : rr.constraints) chain[c.var] = c.rhs.evaluate(chain);
      double direct = e.evaluate(b);
      double via = chain.at(rr.out);
      CHECK(std::fabs(via - direct) <= 1e-12 * std::max(1.0, std::fabs(direct)));
    }
  }
}

TEST_CASE("propagate_ranges") {
  RewriteResult rr = rewrite(parse("sin(x)"));
  DomainMap dom = propagate_ranges(rr.constraints, {{"x", Interval(-1, 1)}});
  CHECK(dom.at(rr.out).lo == doctest::Approx(std::sin(-1.0)));
  CHECK(dom.at(rr.out).hi == doctest::Approx(std::sin(1.0)));

  RewriteResult sq = rewrite(parse("x^2"));
  DomainMap dom2 = propagate_ranges(sq.constraints, {{"x", Interval(-1, 2)}});
  CHECK(dom2.at(sq.out).lo == 0.0);
  CHECK(dom2.at(sq.out).hi == 4.0);

  CHECK_THROWS_AS(
      propagate_ranges(rewrite(parse("log(x)")).constraints, {{"x", Interval(-1, 1)}}),
      EvalError);
}

TEST_CASE("propagate_ranges is sound and monotone") {
  std::mt19937_64 rng(17);
  Expr e = parse("sin(x) * 0.5 + cos(y) - x^2 / 4");
  RewriteResult rr = rewrite(e);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_real_distribution<double> mk(-2.0, 2.0);
    double ax = mk(rng), bx = ax + std::fabs(mk(rng));
    double ay = mk(rng), by = ay + std::fabs(mk(rng));
    DomainMap seed{{"x", Interval(ax, bx)}, {"y", Interval(ay, by)}};
    DomainMap dom = propagate_ranges(rr.constraints, seed);
    std::uniform_real_distribution<double> ux(ax, bx), uy(ay, by);
    for (int i = 0; i < 40; ++i) {
      Binding b{{"x", ux(rng)}, {"y", uy(rng)}};
      CHECK(dom.at(rr.out).contains(e.evaluate(b)));
    }
    // Shrinking the seed never widens any propagated domain.
    DomainMap smaller{{"x", Interval(ax + 0.25 * (bx - ax), bx - 0.25 * (bx - ax))},
                      {"y", Interval(ay + 0.25 * (by - ay), by - 0.25 * (by - ay))}};
    DomainMap dom2 = propagate_ranges(rr.constraints, smaller);
    for (const auto& [name, range] : dom2) CHECK(dom.at(name).contains(range));
  }
}

TEST_CASE("approximate mirrors the two-step structure") {
  RewriteResult rr = rewrite(parse("sin(x^2 + y - log(z))"));
  DomainMap seed{{"x", Interval(1, 2)}, {"y", Interval(1, 2)}, {"z", Interval(1, 2)}};
  OverApproximation oa = approximate(rr, seed, plain(2));

  // Three nonlinear rows each become <=, >=, and two bound definitions; the
  // two affine rows are copied through.
  int le = 0, ge = 0, eq = 0;
  for (const auto& c : oa.constraints) {
    switch (c.kind) {
      case Constraint::Kind::Le: ++le; break;
      case Constraint::Kind::Ge: ++ge; break;
      case Constraint::Kind::Eq: ++eq; break;
    }
  }
  CHECK(le == 3);
  CHECK(ge == 3);
  CHECK(eq == 2 + 6);  // v4, v8 plus three UB/LB definition pairs
  CHECK(oa.constraints[0].var == "v3");
  CHECK(oa.constraints[0].kind == Constraint::Kind::Le);
  CHECK(oa.constraints[0].rhs.to_string() == "v1");
  CHECK(oa.constraints[1].rhs.to_string() == "v2");
  CHECK(oa.constraints[2].var == "v1");

  // Every constrained variable has a domain entry.
  for (const auto& c : oa.constraints) {
    CHECK(oa.domains.count(c.var));
    for (const auto& v : free_variables(c.rhs)) CHECK(oa.domains.count(v));
  }
}

TEST_CASE("approximate keeps an all-affine input unchanged") {
  RewriteResult rr = rewrite(parse("2 * x + 3 - y"));
  DomainMap seed{{"x", Interval(0, 1)}, {"y", Interval(0, 1)}};
  OverApproximation oa = approximate(rr, seed, plain(2));
  REQUIRE(oa.constraints.size() == rr.constraints.size());
  for (size_t i = 0; i < oa.constraints.size(); ++i) {
    CHECK(oa.constraints[i].kind == Constraint::Kind::Eq);
    CHECK(oa.constraints[i].rhs.structurally_equal(rr.constraints[i].rhs));
  }
}

TEST_CASE("pendulum abstraction has the published shape") {
  SystemSpec s = pendulum_spec();
  OverApproximation oa = overapproximate_dynamics(
      s, {Interval(-1, 1), Interval(-1, 1)}, {Interval(-2, 2)}, plain(2));
  REQUIRE(oa.output_vars.size() == 2);

  // Exactly one sandwiched nonlinearity (the sine), i.e. one Le/Ge pair.
  int le = 0, ge = 0;
  for (const auto& c : oa.constraints) {
    le += c.kind == Constraint::Kind::Le;
    ge += c.kind == Constraint::Kind::Ge;
  }
  CHECK(le == 1);
  CHECK(ge == 1);

  // Dimension 1 is a single affine row.
  CHECK(oa.constraints[0].var == oa.output_vars[0]);
  CHECK(is_affine(oa.constraints[0].rhs));
}

TEST_CASE("pendulum envelope contains the true step") {
  SystemSpec s = pendulum_spec();
  OverApproximation oa = overapproximate_dynamics(
      s, {Interval(-1, 1.2), Interval(-1, 1)}, {Interval(-2, 2)}, plain(2));

  // Reference: x = [1, 0.1], u = 0 gives (1.01, 0.26829...).
  Binding in{{"x1", 1.0}, {"x2", 0.1}, {"u", 0.0}};
  Interval e1 = oa.envelope(oa.output_vars[0], in);
  Interval e2 = oa.envelope(oa.output_vars[1], in);
  CHECK(e1.contains(1.01));
  CHECK(e2.contains(0.1 + 0.1 * 2.0 * std::sin(1.0)));

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ux(-1.0, 1.2), uv(-1.0, 1.0), uu(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    double x1 = ux(rng), x2 = uv(rng), u = uu(rng);
    auto next = s.step({x1, x2}, {u});
    Binding b{{"x1", x1}, {"x2", x2}, {"u", u}};
    CHECK(oa.envelope(oa.output_vars[0], b).contains(next[0]));
    CHECK(oa.envelope(oa.output_vars[1], b).contains(next[1]));
  }
}

TEST_CASE("linear system has a zero-width envelope") {
  SystemSpec s;
  s.name = "decay";
  s.state_names = {"x"};
  s.updates = {parse("0.9 * x")};
  OverApproximation oa = overapproximate_dynamics(s, {Interval(1, 2)}, {}, plain(2));
  Interval e = oa.envelope(oa.output_vars[0], {{"x", 1.5}});
  CHECK(e.width() == 0.0);
  CHECK(e.lo == doctest::Approx(1.35).epsilon(1e-15));
}

TEST_CASE("car dynamics: product elimination keeps simulated steps inside") {
  SystemSpec s;
  s.name = "car";
  s.state_names = {"x1", "x2", "x3", "x4"};
  s.control_names = {"u1", "u2"};
  s.updates = {parse("x1 + dt * (x4 * cos(x3))"), parse("x2 + dt * (x4 * sin(x3))"),
               parse("x3 + dt * u2"), parse("x4 + dt * u1")};
  s.params = {{"dt", 0.2}};

  std::vector<Interval> sbox{Interval(9.5, 9.55), Interval(-4.5, -4.45),
                             Interval(2.1, 2.11), Interval(1.5, 1.51)};
  std::vector<Interval> cbox{Interval(-2, 2), Interval(-2, 2)};
  OverApproximation oa = overapproximate_dynamics(s, sbox, cbox, plain(2));

  std::mt19937_64 rng(31);
  auto smp = [&](const Interval& d) {
    return std::uniform_real_distribution<double>(d.lo, d.hi)(rng);
  };
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> x{smp(sbox[0]), smp(sbox[1]), smp(sbox[2]), smp(sbox[3])};
    std::vector<double> u{smp(cbox[0]), smp(cbox[1])};
    auto next = s.step(x, u);
    Binding b{{"x1", x[0]}, {"x2", x[1]}, {"x3", x[2]}, {"x4", x[3]},
              {"u1", u[0]}, {"u2", u[1]}};
    for (int k = 0; k < 4; ++k) {
      Interval env = oa.envelope(oa.output_vars[k], b);
      CHECK(env.lo <= next[k]);
      CHECK(next[k] <= env.hi);
    }
  }
}

TEST_CASE("overapprox serializes to JSON") {
  SystemSpec s = pendulum_spec();
  OverApproximation oa = overapproximate_dynamics(
      s, {Interval(-1, 1), Interval(-1, 1)}, {Interval(-2, 2)}, plain(1));
  std::string j = overapprox_to_json(oa);
  CHECK(j.find("\"constraints\"") != std::string::npos);
  CHECK(j.find("\"domains\"") != std::string::npos);
  // The sine is sandwiched: its bounds print as closed-form max/min terms.
  CHECK(j.find("max(") != std::string::npos);
}

TEST_CASE("tora and acc envelopes contain sampled true steps") {
  std::mt19937_64 rng(47);
  struct Case {
    const char* name;
    std::vector<Interval> sbox;
    std::vector<Interval> cbox;
  };
  std::vector<Case> cases{
      {"tora",
       {Interval(0.6, 0.7), Interval(-0.7, -0.6), Interval(-0.4, -0.3), Interval(0.5, 0.6)},
       {Interval(-2, 2)}},
      {"acc",
       {Interval(90, 91), Interval(10, 11), Interval(30, 30.2), Interval(30, 30.2),
        Interval(0, 0.01), Interval(0, 0.01)},
       {Interval(-2, 2)}},
  };
  for (const auto& c : cases) {
    SystemSpec s;
    if (std::string(c.name) == "tora") {
      s.state_names = {"x1", "x2", "x3", "x4"};
      s.control_names = {"u"};
      s.updates = {parse("x1 + dt * x2"), parse("x2 + dt * (eps * sin(x3) - x1)"),
                   parse("x3 + dt * x4"), parse("x4 + dt * u")};
      s.params = {{"eps", 0.1}, {"dt", 0.1}};
    } else {
      s.state_names = {"x1", "x2", "x3", "x4", "x5", "x6"};
      s.control_names = {"u"};
      s.updates = {parse("x1 + dt * x2"),
                   parse("x2 + dt * x3"),
                   parse("x3 + dt * (-2 * x3 + 2 * a - 2 * mu * x2^2)"),
                   parse("x4 + dt * x5"),
                   parse("x5 + dt * x6"),
                   parse("x6 + dt * (-2 * x6 + 2 * u - 2 * mu * x5^2)")};
      s.params = {{"a", -2.0}, {"mu", 1e-4}, {"dt", 0.1}};
    }
    OverApproximation oa = overapproximate_dynamics(s, c.sbox, c.cbox, plain(2, 1e-4));
    auto smp = [&](const Interval& d) {
      return std::uniform_real_distribution<double>(d.lo, d.hi)(rng);
    };
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> x, u;
      Binding b;
      for (size_t k = 0; k < c.sbox.size(); ++k) {
        x.push_back(smp(c.sbox[k]));
        b[s.state_names[k]] = x.back();
      }
      for (size_t k = 0; k < c.cbox.size(); ++k) {
        u.push_back(smp(c.cbox[k]));
        b[s.control_names[k]] = u.back();
      }
      auto next = s.step(x, u);
      for (size_t k = 0; k < next.size(); ++k) {
        Interval env = oa.envelope(oa.output_vars[k], b);
        CHECK(env.lo <= next[k]);
        CHECK(next[k] <= env.hi);
      }
    }
  }
}

TEST_CASE("rewrite rejects unconverted products and quotients") {
  CHECK_THROWS_AS(rewrite(parse("x * y")), EvalError);
  CHECK_THROWS_AS(rewrite(parse("x / y")), EvalError);
}
