#include "dcflex/lp/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <string>

namespace dcflex::lp {
namespace {

std::string sanitize(const std::string& name, char prefix, std::size_t index) {
  if (name.empty()) return prefix + std::to_string(index);
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
                    c == '[' || c == ']';
    out.push_back(ok ? c : '_');
  }
  if (std::isdigit(static_cast<unsigned char>(out.front())) || out.front() == '.') {
    out.insert(out.begin(), '_');
  }
  return out;
}

void write_number(std::ostream& out, double v) {
  if (std::isinf(v)) {
    out << (v > 0 ? "+inf" : "-inf");
  } else {
    out << v;
  }
}

void write_terms(std::ostream& out, const std::vector<Term>& terms,
                 const std::vector<std::string>& names) {
  if (terms.empty()) {
    out << " 0 " << names.front();
    return;
  }
  for (const Term& t : terms) {
    out << (t.coef < 0 ? " - " : " + ");
    write_number(out, std::abs(t.coef));
    out << ' ' << names[t.var.index];
  }
}

}  // namespace

void write_lp_format(const Model& model, std::ostream& out) {
  const auto n = static_cast<std::size_t>(model.num_variables());
  std::vector<std::string> names(n);
  for (std::size_t j = 0; j < n; ++j) names[j] = sanitize(model.variables()[j].name, 'x', j);
  if (names.empty()) names.emplace_back("x0");

  const auto old_precision = out.precision(17);
  out << "\\ dcflex LP export: " << model.num_variables() << " variables, "
      << model.num_constraints() << " constraints\n";
  out << "Minimize\n obj:";
  std::vector<Term> objective;
  for (std::size_t j = 0; j < n; ++j) {
    const double c = model.variables()[j].objective;
    if (c != 0.0) objective.push_back({VarId{static_cast<std::int32_t>(j)}, c});
  }
  write_terms(out, objective, names);
  if (model.objective_constant() != 0.0) {
    out << (model.objective_constant() < 0 ? " - " : " + ")
        << std::abs(model.objective_constant());
  }
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < model.constraints().size(); ++i) {
    const Constraint& c = model.constraints()[i];
    out << ' ' << sanitize(c.name, 'c', i) << ':';
    write_terms(out, c.terms, names);
    switch (c.relation) {
      case Relation::kLessEqual: out << " <= "; break;
      case Relation::kGreaterEqual: out << " >= "; break;
      case Relation::kEqual: out << " = "; break;
    }
    write_number(out, c.rhs);
    out << '\n';
  }
  out << "Bounds\n";
  for (std::size_t j = 0; j < n; ++j) {
    const Variable& v = model.variables()[j];
    if (std::isinf(v.lower) && std::isinf(v.upper)) {
      out << ' ' << names[j] << " free\n";
    } else if (v.lower == v.upper) {
      out << ' ' << names[j] << " = ";
      write_number(out, v.lower);
      out << '\n';
    } else if (!(v.lower == 0.0 && std::isinf(v.upper))) {
      out << ' ';
      write_number(out, v.lower);
      out << " <= " << names[j] << " <= ";
      write_number(out, v.upper);
      out << '\n';
    }
  }
  out << "End\n";
  out.precision(old_precision);
}

}  // namespace dcflex::lp
