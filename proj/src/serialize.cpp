#include "json.hpp"
#include "overt/overapprox.hpp"

namespace overt {

std::string overapprox_to_json(const OverApproximation& oa) {
  nlohmann::ordered_json j;
  j["state"] = oa.state_vars;
  j["control"] = oa.control_vars;
  j["outputs"] = oa.output_vars;
  auto rel = [](Constraint::Kind k) {
    switch (k) {
      case Constraint::Kind::Eq: return "=";
      case Constraint::Kind::Le: return "<=";
      case Constraint::Kind::Ge: return ">=";
    }
    return "?";
  };
  j["constraints"] = nlohmann::ordered_json::array();
  for (const auto& c : oa.constraints)
    j["constraints"].push_back({{"var", c.var}, {"rel", rel(c.kind)}, {"rhs", c.rhs.to_string()}});
  nlohmann::ordered_json doms;
  for (const auto& [name, d] : oa.domains) doms[name] = {d.lo, d.hi};
  j["domains"] = std::move(doms);
  return j.dump(2);
}

}  // namespace overt
