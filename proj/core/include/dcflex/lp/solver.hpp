#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dcflex/lp/model.hpp"

namespace dcflex::lp {

enum class Status { kOptimal, kInfeasible, kUnbounded };

std::string_view to_string(Status s);

struct Solution {
  Status status = Status::kInfeasible;
  double objective = 0.0;
  std::vector<double> primal;        // per variable
  std::vector<double> dual;          // per constraint: d(objective)/d(rhs)
  std::vector<double> reduced_cost;  // per variable
  std::int64_t iterations = 0;

  bool optimal() const { return status == Status::kOptimal; }
  double value(VarId v) const { return primal.at(v.index); }
  double dual_value(RowId r) const { return dual.at(r.index); }
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Backend {
  kDense,   // explicit basis inverse, reference implementation
  kSparse,  // sparse LU basis factorization with eta updates
  kAuto,    // dense for tiny models, sparse otherwise
};

struct SolverOptions {
  Backend backend = Backend::kAuto;
  // Guaranteed bound/row residual and dual-sign slack of a reported optimum.
  double feasibility_tol = 1e-6;
  double optimality_tol = 1e-6;
  std::int64_t max_iterations = 0;  // 0: scaled to model size
  int refactor_interval = 64;
};

class Solver {
 public:
  virtual ~Solver() = default;
  virtual Solution solve(const Model& model) const = 0;
  virtual std::string_view name() const = 0;
};

std::unique_ptr<Solver> make_solver(const SolverOptions& options = {});

// Validates, solves and checks the result against the model. Throws
// ModelError on malformed input and SolverError on numerical failure.
Solution solve(const Model& model, const SolverOptions& options = {});

// Largest violation of row relations and variable bounds at `primal`.
double max_primal_violation(const Model& model, const std::vector<double>& primal);

// Objective of the dual LP evaluated at the solution's row duals and
// reduced costs. Equals the primal objective at an optimum.
double dual_objective(const Model& model, const Solution& solution);

}  // namespace dcflex::lp
