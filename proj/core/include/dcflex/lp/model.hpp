#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcflex::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct VarId {
  std::int32_t index = -1;
  friend bool operator==(VarId, VarId) = default;
};

struct RowId {
  std::int32_t index = -1;
  friend bool operator==(RowId, RowId) = default;
};

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

struct Term {
  VarId var;
  double coef = 0.0;
};

// Affine expression sum(coef * var) + constant. Duplicate variables are
// allowed and merged when the expression is turned into a constraint row.
class LinearExpr {
 public:
  LinearExpr() = default;
  LinearExpr(double constant) : constant_(constant) {}  // NOLINT(google-explicit-constructor)
  LinearExpr(VarId var, double coef = 1.0) : terms_{{var, coef}} {}  // NOLINT

  LinearExpr& add(VarId var, double coef) {
    if (coef != 0.0) terms_.push_back({var, coef});
    return *this;
  }
  LinearExpr& add(const LinearExpr& other, double scale = 1.0);
  LinearExpr& operator+=(double c) {
    constant_ += c;
    return *this;
  }
  LinearExpr& operator+=(const LinearExpr& other) { return add(other); }
  LinearExpr& operator-=(const LinearExpr& other) { return add(other, -1.0); }
  LinearExpr& operator*=(double s);

  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

LinearExpr operator+(LinearExpr lhs, const LinearExpr& rhs);
LinearExpr operator-(LinearExpr lhs, const LinearExpr& rhs);
LinearExpr operator*(double s, LinearExpr e);

struct Variable {
  double lower = 0.0;
  double upper = kInf;
  double objective = 0.0;
  std::string name;
};

struct Constraint {
  std::vector<Term> terms;
  Relation relation = Relation::kEqual;
  double rhs = 0.0;
  std::string name;
};

class ModelError : public std::invalid_argument {
 public:
  ModelError(const std::string& what, std::vector<std::int32_t> rows)
      : std::invalid_argument(what), rows_(std::move(rows)) {}
  // Offending constraint ids (empty when the problem is a variable bound).
  const std::vector<std::int32_t>& rows() const { return rows_; }

 private:
  std::vector<std::int32_t> rows_;
};

// Minimization LP: variables with box bounds, linear rows, linear objective.
class Model {
 public:
  VarId add_variable(double lower, double upper, double objective = 0.0,
                     std::string name = {});
  RowId add_constraint(std::vector<Term> terms, Relation rel, double rhs,
                       std::string name = {});
  // The expression constant is moved to the right-hand side.
  RowId add_constraint(const LinearExpr& lhs, Relation rel, double rhs,
                       std::string name = {});

  void set_objective(VarId var, double coef);
  void add_objective(VarId var, double coef);
  void add_objective(const LinearExpr& expr, double scale = 1.0);
  void set_bounds(VarId var, double lower, double upper);

  double objective_constant() const { return objective_constant_; }
  std::int32_t num_variables() const {
    return static_cast<std::int32_t>(vars_.size());
  }
  std::int32_t num_constraints() const {
    return static_cast<std::int32_t>(rows_.size());
  }
  std::size_t num_nonzeros() const;

  const Variable& variable(VarId v) const { return vars_.at(v.index); }
  const Constraint& constraint(RowId r) const { return rows_.at(r.index); }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }

  // Throws ModelError naming every malformed constraint (unknown variable,
  // non-finite coefficient or rhs) and every variable with lower > upper.
  void validate() const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  double objective_constant_ = 0.0;
};

}  // namespace dcflex::lp
