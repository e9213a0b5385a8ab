#include "dcflex/lp/model.hpp"

#include <cmath>
#include <sstream>

namespace dcflex::lp {

LinearExpr& LinearExpr::add(const LinearExpr& other, double scale) {
  for (const Term& t : other.terms_) add(t.var, t.coef * scale);
  constant_ += other.constant_ * scale;
  return *this;
}

LinearExpr& LinearExpr::operator*=(double s) {
  for (Term& t : terms_) t.coef *= s;
  constant_ *= s;
  return *this;
}

LinearExpr operator+(LinearExpr lhs, const LinearExpr& rhs) { return lhs += rhs; }
LinearExpr operator-(LinearExpr lhs, const LinearExpr& rhs) { return lhs -= rhs; }
LinearExpr operator*(double s, LinearExpr e) { return e *= s; }

VarId Model::add_variable(double lower, double upper, double objective,
                          std::string name) {
  vars_.push_back({lower, upper, objective, std::move(name)});
  return VarId{static_cast<std::int32_t>(vars_.size() - 1)};
}

RowId Model::add_constraint(std::vector<Term> terms, Relation rel, double rhs,
                            std::string name) {
  rows_.push_back({std::move(terms), rel, rhs, std::move(name)});
  return RowId{static_cast<std::int32_t>(rows_.size() - 1)};
}

RowId Model::add_constraint(const LinearExpr& lhs, Relation rel, double rhs,
                            std::string name) {
  return add_constraint(lhs.terms(), rel, rhs - lhs.constant(), std::move(name));
}

void Model::set_objective(VarId var, double coef) { vars_.at(var.index).objective = coef; }

void Model::add_objective(VarId var, double coef) { vars_.at(var.index).objective += coef; }

void Model::add_objective(const LinearExpr& expr, double scale) {
  for (const Term& t : expr.terms()) add_objective(t.var, t.coef * scale);
  objective_constant_ += expr.constant() * scale;
}

void Model::set_bounds(VarId var, double lower, double upper) {
  Variable& v = vars_.at(var.index);
  v.lower = lower;
  v.upper = upper;
}

std::size_t Model::num_nonzeros() const {
  std::size_t n = 0;
  for (const Constraint& c : rows_) n += c.terms.size();
  return n;
}

void Model::validate() const {
  std::vector<std::int32_t> bad_rows;
  std::ostringstream msg;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    const Variable& v = vars_[j];
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper ||
        v.lower == kInf || v.upper == -kInf || !std::isfinite(v.objective)) {
      msg << " variable " << j << (v.name.empty() ? "" : " (" + v.name + ")")
          << " has invalid bounds [" << v.lower << ", " << v.upper
          << "] or objective;";
    }
  }
  const auto n = static_cast<std::int32_t>(vars_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const Constraint& c = rows_[i];
    bool ok = std::isfinite(c.rhs);
    for (const Term& t : c.terms) {
      if (t.var.index < 0 || t.var.index >= n || !std::isfinite(t.coef)) ok = false;
    }
    if (!ok) bad_rows.push_back(static_cast<std::int32_t>(i));
  }
  if (!bad_rows.empty()) {
    msg << " malformed constraints:";
    for (std::int32_t r : bad_rows) {
      msg << ' ' << r;
      if (!rows_[r].name.empty()) msg << " (" << rows_[r].name << ')';
    }
  }
  const std::string text = msg.str();
  if (!text.empty()) throw ModelError("invalid LP model:" + text, std::move(bad_rows));
}

}  // namespace dcflex::lp
