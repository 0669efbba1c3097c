#include "overt/benchmarks.hpp"

#include <random>

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace overt {

namespace {

BenchmarkInstance pendulum() {
  BenchmarkInstance b;
  b.system.name = "pendulum";
  b.system.state_names = {"x1", "x2"};
  b.system.control_names = {"u"};
  b.system.updates = {parse("x1 + dt * x2"),
                      parse("x2 + dt * (g / l * sin(x1) + u / (m * l^2))")};
  b.system.params = {{"m", 0.5}, {"l", 0.5}, {"g", 1.0}, {"dt", 0.1}};
  b.initial = Box{{Interval(1.0, 1.2), Interval(0.0, 0.2)}};
  b.horizon = 25;
  b.default_schedule.segments = {5, 5, 5, 5, 5};
  b.property.modality = Property::Modality::G;
  b.property.t_begin = 1;
  b.property.t_end = 25;
  b.property.atoms = {{{{"x1", 1.0}}, Rel::Ge, -0.2167}};
  return b;
}

BenchmarkInstance tora() {
  BenchmarkInstance b;
  b.system.name = "tora";
  b.system.state_names = {"x1", "x2", "x3", "x4"};
  b.system.control_names = {"u"};
  b.system.updates = {parse("x1 + dt * x2"), parse("x2 + dt * (eps * sin(x3) - x1)"),
                      parse("x3 + dt * x4"), parse("x4 + dt * u")};
  b.system.params = {{"eps", 0.1}, {"dt", 0.1}};
  b.initial = Box{{Interval(0.6, 0.7), Interval(-0.7, -0.6), Interval(-0.4, -0.3),
                   Interval(0.5, 0.6)}};
  b.horizon = 15;
  b.default_schedule.segments = {5, 5, 5};
  b.property.modality = Property::Modality::G;
  b.property.t_begin = 1;
  b.property.t_end = 15;
  b.property.atoms = {{{{"x1", 1.0}}, Rel::Ge, -2.0}, {{{"x1", 1.0}}, Rel::Le, 2.0}};
  return b;
}

BenchmarkInstance car() {
  BenchmarkInstance b;
  b.system.name = "car";
  b.system.state_names = {"x1", "x2", "x3", "x4"};
  b.system.control_names = {"u1", "u2"};
  b.system.updates = {parse("x1 + dt * (x4 * cos(x3))"), parse("x2 + dt * (x4 * sin(x3))"),
                      parse("x3 + dt * u2"), parse("x4 + dt * u1")};
  b.system.params = {{"dt", 0.2}};
  b.initial = Box{{Interval(9.5, 9.55), Interval(-4.5, -4.45), Interval(2.1, 2.11),
                   Interval(1.5, 1.51)}};
  b.horizon = 10;
  b.default_schedule.segments = {5, 5};
  b.property.modality = Property::Modality::F;
  b.property.t_begin = 1;
  b.property.t_end = 10;
  b.property.atoms = {{{{"x1", 1.0}}, Rel::Ge, -0.6},
                      {{{"x1", 1.0}}, Rel::Le, 0.6},
                      {{{"x2", 1.0}}, Rel::Ge, -0.2},
                      {{{"x2", 1.0}}, Rel::Le, 0.2}};
  return b;
}

BenchmarkInstance acc() {
  BenchmarkInstance b;
  b.system.name = "acc";
  b.system.state_names = {"x1", "x2", "x3", "x4", "x5", "x6"};
  b.system.control_names = {"u"};
  b.system.updates = {parse("x1 + dt * x2"),
                      parse("x2 + dt * x3"),
                      parse("x3 + dt * (-2 * x3 + 2 * a - 2 * mu * x2^2)"),
                      parse("x4 + dt * x5"),
                      parse("x5 + dt * x6"),
                      parse("x6 + dt * (-2 * x6 + 2 * u - 2 * mu * x5^2)")};
  b.system.params = {{"a", -2.0}, {"mu", 1e-4}, {"dt", 0.1}};
  b.initial = Box{{Interval(90, 91), Interval(10, 11), Interval(30, 30.2),
                   Interval(30, 30.2), Interval(0, 0.01), Interval(0, 0.01)}};
  b.horizon = 55;
  b.default_schedule.segments = {5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5};
  b.property.modality = Property::Modality::G;
  b.property.t_begin = 1;
  b.property.t_end = 55;
  // x_lead - x_ego >= T_gap*v_ego + D_min with D_min = 10, T_gap = 1.4.
  b.property.atoms = {{{{"x1", 1.0}, {"x4", -1.0}, {"x5", -1.4}}, Rel::Ge, 10.0}};
  b.derived_outputs["y"] = {{"x1", 1.0}, {"x4", -1.0}, {"x5", -1.4}};
  return b;
}

}  // namespace

std::vector<std::string> benchmark_names() { return {"pendulum", "tora", "car", "acc"}; }

BenchmarkInstance get_system(const std::string& name) {
  if (name == "pendulum") return pendulum();
  if (name == "tora") return tora();
  if (name == "car") return car();
  if (name == "acc") return acc();
  throw std::invalid_argument("unknown benchmark '" + name + "'");
}

SystemSpec load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("system: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("system: invalid JSON: ") + e.what());
  }
  SystemSpec s;
  s.name = j.value("name", "system");
  s.state_names = j.at("state").get<std::vector<std::string>>();
  if (j.contains("control")) s.control_names = j.at("control").get<std::vector<std::string>>();
  for (const auto& u : j.at("updates")) s.updates.push_back(parse(u.get<std::string>()));
  if (j.contains("params"))
    for (const auto& [k, v] : j.at("params").items()) s.params[k] = v.get<double>();
  if (s.updates.size() != s.state_names.size())
    throw SchemaError("system: one update per state dimension required");
  return s;
}

std::string system_to_json_text(const SystemSpec& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["state"] = s.state_names;
  j["control"] = s.control_names;
  j["updates"] = nlohmann::ordered_json::array();
  for (const auto& u : s.updates) j["updates"].push_back(u.to_string());
  nlohmann::ordered_json params;
  for (const auto& [k, v] : s.params) params[k] = v;
  j["params"] = std::move(params);
  return j.dump(2);
}

McResult simulate_mc(const BenchmarkInstance& instance, const Network& controller,
                     int samples, uint64_t seed, int horizon_override,
                     bool keep_trajectories) {
  if (samples < 1) throw std::invalid_argument("simulate_mc: need at least one sample");
  const int horizon = horizon_override >= 0 ? horizon_override : instance.horizon;
  const size_t dim = instance.system.state_dim();
  std::mt19937_64 rng(seed);

  McResult out;
  out.hulls.assign(horizon + 1, Box{std::vector<Interval>(
                                    dim, Interval(std::numeric_limits<double>::infinity(),
                                                  std::numeric_limits<double>::infinity()))});
  auto absorb = [&](int t, const std::vector<double>& x) {
    Box& h = out.hulls[t];
    for (size_t k = 0; k < dim; ++k) {
      if (!std::isfinite(h.dims[k].lo)) {
        h.dims[k] = Interval::point(x[k]);
      } else {
        h.dims[k] = Interval(std::min(h.dims[k].lo, x[k]), std::max(h.dims[k].hi, x[k]));
      }
    }
  };

  for (int s = 0; s < samples; ++s) {
    std::vector<double> x(dim);
    if (s == 0) {
      for (size_t k = 0; k < dim; ++k) x[k] = instance.initial.dims[k].mid();
    } else {
      for (size_t k = 0; k < dim; ++k) {
        const Interval& d = instance.initial.dims[k];
        std::uniform_real_distribution<double> u(d.lo, d.hi);
        x[k] = u(rng);
      }
    }
    Trajectory traj;
    traj.states.push_back(x);
    absorb(0, x);
    for (int t = 1; t <= horizon; ++t) {
      std::vector<double> u;
      if (instance.system.control_dim()) u = forward(controller, x);
      x = instance.system.step(x, u);
      traj.controls.push_back(u);
      traj.states.push_back(x);
      absorb(t, x);
    }
    if (keep_trajectories) out.trajectories.push_back(std::move(traj));
  }
  return out;
}

}  // namespace overt
