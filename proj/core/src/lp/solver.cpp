#include "dcflex/lp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "simplex.hpp"

namespace dcflex::lp {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr int kDenseRowLimit = 150;

class SimplexSolver final : public Solver {
 public:
  SimplexSolver(Backend backend, const SolverOptions& options)
      : backend_(backend), options_(options) {}

  Solution solve(const Model& model) const override {
    const detail::StandardForm sf = detail::make_standard_form(model);
    const bool dense = backend_ == Backend::kDense ||
                       (backend_ == Backend::kAuto && sf.rows <= kDenseRowLimit);
    auto factor = dense ? detail::make_dense_factor() : detail::make_sparse_factor();

    detail::EngineOptions eo;
    eo.primal_tol = std::min(1e-9, options_.feasibility_tol * 1e-3);
    eo.dual_tol = std::min(1e-9, options_.optimality_tol * 1e-3);
    eo.max_iterations = options_.max_iterations;
    eo.refactor_interval = std::max(1, options_.refactor_interval);
    const detail::EngineResult er = detail::run_simplex(sf, *factor, eo);

    Solution sol;
    sol.status = er.status;
    sol.iterations = er.iterations;
    const int n = sf.structurals;
    sol.primal.assign(er.x.data(), er.x.data() + n);
    sol.reduced_cost.assign(er.d.data(), er.d.data() + n);
    sol.dual.assign(er.y.data(), er.y.data() + sf.rows);
    double obj = model.objective_constant();
    for (int j = 0; j < n; ++j) obj += sf.cost[j] * sol.primal[j];
    sol.objective = obj;
    return sol;
  }

  std::string_view name() const override {
    switch (backend_) {
      case Backend::kDense: return "dense-simplex";
      case Backend::kSparse: return "sparse-simplex";
      case Backend::kAuto: return "auto-simplex";
    }
    return "simplex";
  }

 private:
  Backend backend_;
  SolverOptions options_;
};

}  // namespace

std::unique_ptr<Solver> make_solver(const SolverOptions& options) {
  return std::make_unique<SimplexSolver>(options.backend, options);
}

Solution solve(const Model& model, const SolverOptions& options) {
  model.validate();
  Solution sol = make_solver(options)->solve(model);
  if (sol.optimal()) {
    const double viol = max_primal_violation(model, sol.primal);
    if (!(viol <= options.feasibility_tol)) {
      std::ostringstream msg;
      msg << "LP solution violates constraints by " << viol << " (tolerance "
          << options.feasibility_tol << "; rows=" << model.num_constraints()
          << ", columns=" << model.num_variables() << ", nonzeros="
          << model.num_nonzeros() << ", iterations=" << sol.iterations << ")";
      throw SolverError(msg.str());
    }
  }
  return sol;
}

double max_primal_violation(const Model& model, const std::vector<double>& primal) {
  double worst = 0.0;
  for (std::int32_t j = 0; j < model.num_variables(); ++j) {
    const Variable& v = model.variables()[j];
    worst = std::max({worst, v.lower - primal[j], primal[j] - v.upper});
  }
  for (const Constraint& c : model.constraints()) {
    double lhs = 0.0;
    for (const Term& t : c.terms) lhs += t.coef * primal[t.var.index];
    const double r = lhs - c.rhs;
    switch (c.relation) {
      case Relation::kLessEqual: worst = std::max(worst, r); break;
      case Relation::kGreaterEqual: worst = std::max(worst, -r); break;
      case Relation::kEqual: worst = std::max(worst, std::abs(r)); break;
    }
  }
  return worst;
}

double dual_objective(const Model& model, const Solution& solution) {
  double obj = model.objective_constant();
  for (std::int32_t i = 0; i < model.num_constraints(); ++i) {
    obj += solution.dual[i] * model.constraints()[i].rhs;
  }
  for (std::int32_t j = 0; j < model.num_variables(); ++j) {
    const double d = solution.reduced_cost[j];
    const Variable& v = model.variables()[j];
    if (d > 0.0 && std::isfinite(v.lower)) obj += d * v.lower;
    if (d < 0.0 && std::isfinite(v.upper)) obj += d * v.upper;
  }
  return obj;
}

}  // namespace dcflex::lp
