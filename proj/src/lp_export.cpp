#include <charconv>
#include <sstream>

#include "overt/mip.hpp"

namespace overt {

namespace {

std::string num(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

// LP-format identifiers cannot start with a digit or contain '#'.
std::string sanitize(const std::string& name, int index) {
  std::string out = "v" + std::to_string(index) + "_";
  for (char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
  return out;
}

void write_terms(std::ostream& os, const LinExpr& e, const std::vector<std::string>& names) {
  bool first = true;
  for (const auto& [v, c] : e.terms) {
    if (c >= 0 && !first) os << " + " << num(c);
    else if (c >= 0) os << num(c);
    else os << (first ? "- " : " - ") << num(-c);
    os << " " << names[v];
    first = false;
  }
  if (first) os << "0 " << names[0];
}

}  // namespace

std::string to_lp_format(const MipProblem& p) {
  std::vector<std::string> names;
  names.reserve(p.vars.size());
  for (size_t j = 0; j < p.vars.size(); ++j) names.push_back(sanitize(p.vars[j].name, j));

  std::ostringstream os;
  os << (p.maximize ? "Maximize" : "Minimize") << "\n obj: ";
  if (p.objective) write_terms(os, *p.objective, names);
  else os << "0 " << names[0];
  os << "\nSubject To\n";
  for (size_t i = 0; i < p.cons.size(); ++i) {
    os << " c" << i << ": ";
    write_terms(os, p.cons[i].expr, names);
    switch (p.cons[i].rel) {
      case Rel::Le: os << " <= "; break;
      case Rel::Ge: os << " >= "; break;
      case Rel::Eq: os << " = "; break;
    }
    os << num(p.cons[i].rhs) << "\n";
  }
  os << "Bounds\n";
  for (size_t j = 0; j < p.vars.size(); ++j)
    os << " " << num(p.vars[j].lo) << " <= " << names[j] << " <= " << num(p.vars[j].hi)
       << "\n";
  bool any_bin = false;
  for (const auto& v : p.vars) any_bin |= v.binary;
  if (any_bin) {
    os << "Binaries\n";
    for (size_t j = 0; j < p.vars.size(); ++j)
      if (p.vars[j].binary) os << " " << names[j] << "\n";
  }
  os << "End\n";
  return os.str();
}

}  // namespace overt
