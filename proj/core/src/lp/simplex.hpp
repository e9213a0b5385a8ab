#pragma once

// Bounded primal simplex shared by the dense and sparse backends.
//
// Every row a_i x {<=,=,>=} b_i becomes a_i x - r_i = 0 with a logical
// column r_i whose bounds encode the relation, so the working matrix is
// [A  -I] and every column carries a box [lower, upper]. Phase 1 minimizes
// the sum of bound violations of the basic variables; phase 2 the true cost.

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "dcflex/lp/model.hpp"
#include "dcflex/lp/solver.hpp"

namespace dcflex::lp::detail {

struct StandardForm {
  int rows = 0;
  int structurals = 0;
  Eigen::SparseMatrix<double> a;  // rows x structurals, column major
  std::vector<double> lower;      // structurals + rows
  std::vector<double> upper;
  std::vector<double> cost;

  int columns() const { return rows + structurals; }
};

StandardForm make_standard_form(const Model& model);

class BasisFactor {
 public:
  virtual ~BasisFactor() = default;
  // Factorizes the basis formed by `head`. Returns false when singular.
  virtual bool factorize(const StandardForm& sf, const std::vector<int>& head) = 0;
  // v <- B^{-1} v
  virtual void ftran(Eigen::VectorXd& v) const = 0;
  // v <- B^{-T} v
  virtual void btran(Eigen::VectorXd& v) const = 0;
  // Column `pos` of the basis replaced; alpha = B^{-1} a_entering.
  virtual void update(int pos, const Eigen::VectorXd& alpha) = 0;
  virtual int updates_since_factorize() const = 0;
};

std::unique_ptr<BasisFactor> make_dense_factor();
std::unique_ptr<BasisFactor> make_sparse_factor();

struct EngineOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::int64_t max_iterations = 0;
  int refactor_interval = 64;
};

struct EngineResult {
  Status status = Status::kInfeasible;
  Eigen::VectorXd x;  // all columns
  Eigen::VectorXd y;  // row duals
  Eigen::VectorXd d;  // reduced costs, all columns
  std::int64_t iterations = 0;
};

EngineResult run_simplex(const StandardForm& sf, BasisFactor& factor,
                         const EngineOptions& options);

}  // namespace dcflex::lp::detail
