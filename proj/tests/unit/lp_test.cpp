#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "dcflex/lp/lp_format.hpp"
#include "dcflex/lp/model.hpp"
#include "dcflex/lp/solver.hpp"

namespace dcflex::lp {
namespace {

SolverOptions with_backend(Backend b) {
  SolverOptions o;
  o.backend = b;
  return o;
}

class LpBackendTest : public ::testing::TestWithParam<Backend> {};

TEST_P(LpBackendTest, BoundActiveMinimum) {
  Model m;
  const VarId x = m.add_variable(-kInf, kInf, 1.0, "x");
  m.add_constraint({{x, 1.0}}, Relation::kGreaterEqual, 3.0);
  m.add_constraint({{x, 1.0}}, Relation::kLessEqual, 10.0);
  const Solution s = solve(m, with_backend(GetParam()));
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.value(x), 3.0, 1e-9);
  EXPECT_NEAR(s.objective, 3.0, 1e-9);
}

TEST_P(LpBackendTest, EqualityDualIsOne) {
  Model m;
  const VarId x = m.add_variable(0.0, kInf, 1.0);
  const VarId y = m.add_variable(0.0, kInf, 1.0);
  const RowId r = m.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::kEqual, 5.0);
  const Solution s = solve(m, with_backend(GetParam()));
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.objective, 5.0, 1e-9);
  EXPECT_NEAR(s.dual_value(r), 1.0, 1e-9);
}

TEST_P(LpBackendTest, EmptyFeasibleSetIsInfeasible) {
  Model m;
  const VarId x = m.add_variable(-kInf, kInf, 0.0);
  m.add_constraint({{x, 1.0}}, Relation::kLessEqual, 1.0);
  m.add_constraint({{x, 1.0}}, Relation::kGreaterEqual, 2.0);
  EXPECT_EQ(solve(m, with_backend(GetParam())).status, Status::kInfeasible);
}

TEST_P(LpBackendTest, DetectsUnboundedRay) {
  Model m;
  const VarId x = m.add_variable(0.0, kInf, -1.0);
  const VarId y = m.add_variable(0.0, kInf, 0.0);
  m.add_constraint({{x, 1.0}, {y, -1.0}}, Relation::kLessEqual, 1.0);
  EXPECT_EQ(solve(m, with_backend(GetParam())).status, Status::kUnbounded);
}

TEST_P(LpBackendTest, DualSignsFollowRhsSensitivity) {
  // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6  -> x = 1.6, y = 1.2
  Model m;
  const VarId x = m.add_variable(0.0, kInf, -1.0);
  const VarId y = m.add_variable(0.0, kInf, -1.0);
  const RowId r1 = m.add_constraint({{x, 1.0}, {y, 2.0}}, Relation::kLessEqual, 4.0);
  const RowId r2 = m.add_constraint({{x, 3.0}, {y, 1.0}}, Relation::kLessEqual, 6.0);
  const Solution s = solve(m, with_backend(GetParam()));
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.value(x), 1.6, 1e-9);
  EXPECT_NEAR(s.value(y), 1.2, 1e-9);
  EXPECT_NEAR(s.objective, -2.8, 1e-9);
  // Finite differences on the rhs give the same sensitivities.
  for (const RowId r : {r1, r2}) {
    Model rebuilt;
    rebuilt.add_variable(0.0, kInf, -1.0);
    rebuilt.add_variable(0.0, kInf, -1.0);
    for (std::int32_t i = 0; i < m.num_constraints(); ++i) {
      const Constraint& src = m.constraint(RowId{i});
      rebuilt.add_constraint(src.terms, src.relation, src.rhs + (i == r.index ? 1e-3 : 0.0));
    }
    const Solution sb = solve(rebuilt, with_backend(GetParam()));
    EXPECT_NEAR((sb.objective - s.objective) / 1e-3, s.dual_value(r), 1e-6);
    EXPECT_LE(s.dual_value(r), 1e-12);
  }
  EXPECT_NEAR(dual_objective(m, s), s.objective, 1e-9);
}

TEST_P(LpBackendTest, FreeVariablesAndRanges) {
  // min |x - 2| + |y + 1| via split variables; x, y free.
  Model m;
  const VarId x = m.add_variable(-kInf, kInf, 0.0);
  const VarId y = m.add_variable(-kInf, kInf, 0.0);
  const VarId ex = m.add_variable(0.0, kInf, 1.0);
  const VarId ey = m.add_variable(0.0, kInf, 1.0);
  m.add_constraint({{ex, 1.0}, {x, -1.0}}, Relation::kGreaterEqual, -2.0);
  m.add_constraint({{ex, 1.0}, {x, 1.0}}, Relation::kGreaterEqual, 2.0);
  m.add_constraint({{ey, 1.0}, {y, -1.0}}, Relation::kGreaterEqual, 1.0);
  m.add_constraint({{ey, 1.0}, {y, 1.0}}, Relation::kGreaterEqual, -1.0);
  const Solution s = solve(m, with_backend(GetParam()));
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.objective, 0.0, 1e-9);
  EXPECT_NEAR(s.value(x), 2.0, 1e-9);
  EXPECT_NEAR(s.value(y), -1.0, 1e-9);
}

TEST_P(LpBackendTest, EmptyModel) {
  Model m;
  const Solution s = solve(m, with_backend(GetParam()));
  EXPECT_TRUE(s.optimal());
  EXPECT_EQ(s.objective, 0.0);
}

INSTANTIATE_TEST_SUITE_P(Backends, LpBackendTest,
                         ::testing::Values(Backend::kDense, Backend::kSparse),
                         [](const auto& info) {
                           return info.param == Backend::kDense ? "Dense" : "Sparse";
                         });

TEST(LpModel, ValidationListsOffendingRows) {
  Model m;
  const VarId x = m.add_variable(0.0, 1.0);
  m.add_constraint({{x, 1.0}}, Relation::kLessEqual, 1.0, "good");
  m.add_constraint({{VarId{7}, 1.0}}, Relation::kLessEqual, 1.0, "dangling");
  m.add_constraint({{x, std::nan("")}}, Relation::kEqual, 0.0);
  try {
    m.validate();
    FAIL() << "expected ModelError";
  } catch (const ModelError& e) {
    EXPECT_EQ(e.rows(), (std::vector<std::int32_t>{1, 2}));
    EXPECT_NE(std::string(e.what()).find("dangling"), std::string::npos);
  }
}

TEST(LpModel, ValidationRejectsInvertedBounds) {
  Model m;
  m.add_variable(2.0, 1.0, 0.0, "bad");
  EXPECT_THROW(m.validate(), ModelError);
  EXPECT_THROW(solve(m), ModelError);
}

TEST(LpModel, ExpressionConstantMovesToRhs) {
  Model m;
  const VarId x = m.add_variable(0.0, kInf, 1.0);
  LinearExpr e(x);
  e += 4.0;
  const RowId r = m.add_constraint(e, Relation::kGreaterEqual, 10.0);
  EXPECT_DOUBLE_EQ(m.constraint(r).rhs, 6.0);
  EXPECT_NEAR(solve(m).value(x), 6.0, 1e-9);
}

TEST(LpFormat, WritesReadableSections) {
  Model m;
  const VarId x = m.add_variable(0.0, 10.0, 2.0, "gen output");
  const VarId y = m.add_variable(-kInf, kInf, 0.0, "theta");
  m.add_constraint({{x, 1.0}, {y, -3.5}}, Relation::kEqual, 4.0, "balance");
  std::ostringstream out;
  write_lp_format(m, out);
  const std::string text = out.str();
  EXPECT_NE(text.find("Minimize\n obj: + 2 gen_output"), std::string::npos);
  EXPECT_NE(text.find(" balance: + 1 gen_output - 3.5 theta = 4"), std::string::npos);
  EXPECT_NE(text.find(" 0 <= gen_output <= 10"), std::string::npos);
  EXPECT_NE(text.find(" theta free"), std::string::npos);
  EXPECT_NE(text.find("End"), std::string::npos);
}

// ---- vertex-enumeration oracle -------------------------------------------

struct BoxedLp {
  Model model;
  int n = 0;
};

BoxedLp random_boxed_lp(std::mt19937& rng) {
  std::uniform_int_distribution<int> nvar(1, 3);
  std::uniform_int_distribution<int> nrow(0, 3);
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_int_distribution<int> rel(0, 2);
  BoxedLp lp;
  lp.n = nvar(rng);
  for (int j = 0; j < lp.n; ++j) {
    const double lo = coef(rng);
    const double hi = lo + std::abs(coef(rng)) + (rel(rng) == 0 ? 0.0 : 1.0);
    lp.model.add_variable(lo, hi, coef(rng));
  }
  const int m = nrow(rng);
  for (int i = 0; i < m; ++i) {
    std::vector<Term> terms;
    for (int j = 0; j < lp.n; ++j) {
      const int c = coef(rng);
      if (c != 0) terms.push_back({VarId{j}, static_cast<double>(c)});
    }
    lp.model.add_constraint(terms, static_cast<Relation>(rel(rng)), coef(rng) * 1.5);
  }
  return lp;
}

// Minimum over all vertices of the bounded polytope; nullopt when empty.
std::optional<double> brute_force_optimum(const BoxedLp& lp) {
  const int n = lp.n;
  std::vector<Eigen::VectorXd> normals;
  std::vector<double> offsets;
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = 1.0;
    normals.push_back(e);
    offsets.push_back(lp.model.variables()[j].lower);
    normals.push_back(e);
    offsets.push_back(lp.model.variables()[j].upper);
  }
  for (const Constraint& c : lp.model.constraints()) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (const Term& t : c.terms) a[t.var.index] += t.coef;
    normals.push_back(a);
    offsets.push_back(c.rhs);
  }
  const int k = static_cast<int>(normals.size());
  std::optional<double> best;
  std::vector<int> pick(n);
  // Enumerate n-subsets of the k hyperplanes.
  std::vector<bool> mask(k, false);
  std::fill(mask.begin(), mask.begin() + n, true);
  do {
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd b(n);
    int r = 0;
    for (int i = 0; i < k; ++i) {
      if (!mask[i]) continue;
      a.row(r) = normals[i].transpose();
      b[r] = offsets[i];
      ++r;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd x = lu.solve(b);
    std::vector<double> xv(x.data(), x.data() + n);
    if (max_primal_violation(lp.model, xv) > 1e-7) continue;
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += lp.model.variables()[j].objective * x[j];
    if (!best || obj < *best) best = obj;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

TEST(LpProperty, MatchesVertexEnumerationOnRandomBoxedLps) {
  std::mt19937 rng(20240611);
  int feasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const BoxedLp lp = random_boxed_lp(rng);
    const std::optional<double> oracle = brute_force_optimum(lp);
    for (Backend b : {Backend::kDense, Backend::kSparse}) {
      const Solution s = solve(lp.model, with_backend(b));
      if (!oracle) {
        EXPECT_EQ(s.status, Status::kInfeasible) << "trial " << trial;
        continue;
      }
      ASSERT_TRUE(s.optimal()) << "trial " << trial;
      EXPECT_NEAR(s.objective, *oracle, 1e-7 * (1.0 + std::abs(*oracle))) << "trial " << trial;
      EXPECT_LE(max_primal_violation(lp.model, s.primal), 1e-6);
      // Strong duality.
      EXPECT_NEAR(dual_objective(lp.model, s), s.objective, 1e-5 * (1.0 + std::abs(s.objective)))
          << "trial " << trial;
    }
    feasible += oracle.has_value();
  }
  EXPECT_GT(feasible, 100);
}

// Transportation LPs: larger, degenerate, both backends must agree and the
// dual must certify optimality.
Model transportation(int sources, int sinks, std::mt19937& rng) {
  std::uniform_real_distribution<double> cost(1.0, 20.0);
  std::uniform_real_distribution<double> amount(10.0, 50.0);
  Model m;
  std::vector<std::vector<VarId>> ship(sources);
  for (int s = 0; s < sources; ++s) {
    for (int t = 0; t < sinks; ++t) ship[s].push_back(m.add_variable(0.0, kInf, cost(rng)));
  }
  double total_demand = 0.0;
  for (int t = 0; t < sinks; ++t) {
    std::vector<Term> terms;
    for (int s = 0; s < sources; ++s) terms.push_back({ship[s][t], 1.0});
    const double d = std::round(amount(rng));
    total_demand += d;
    m.add_constraint(terms, Relation::kEqual, d);
  }
  for (int s = 0; s < sources; ++s) {
    std::vector<Term> terms;
    for (int t = 0; t < sinks; ++t) terms.push_back({ship[s][t], 1.0});
    m.add_constraint(terms, Relation::kLessEqual, std::round(total_demand / sources) + 5.0);
  }
  return m;
}

TEST(LpProperty, BackendsAgreeOnTransportationProblems) {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const Model m = transportation(6 + trial, 9 + trial, rng);
    const Solution dense = solve(m, with_backend(Backend::kDense));
    const Solution sparse = solve(m, with_backend(Backend::kSparse));
    ASSERT_TRUE(dense.optimal());
    ASSERT_TRUE(sparse.optimal());
    EXPECT_NEAR(dense.objective, sparse.objective, 1e-8 * std::abs(dense.objective));
    EXPECT_NEAR(dual_objective(m, sparse), sparse.objective, 1e-5 * std::abs(sparse.objective));
  }
}

TEST(LpProperty, ResolveIsReproducible) {
  std::mt19937 rng(5);
  const Model m = transportation(12, 15, rng);
  const Solution a = solve(m, with_backend(Backend::kSparse));
  const Solution b = solve(m, with_backend(Backend::kSparse));
  EXPECT_NEAR(a.objective, b.objective, 1e-8 * std::abs(a.objective));
  EXPECT_EQ(a.primal, b.primal);
}

}  // namespace
}  // namespace dcflex::lp
