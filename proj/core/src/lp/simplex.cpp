#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dcflex::lp::detail {

StandardForm make_standard_form(const Model& model) {
  StandardForm sf;
  sf.rows = model.num_constraints();
  sf.structurals = model.num_variables();
  const int n = sf.structurals;
  const int total = sf.columns();
  sf.lower.resize(total);
  sf.upper.resize(total);
  sf.cost.assign(total, 0.0);

  for (int j = 0; j < n; ++j) {
    const Variable& v = model.variables()[j];
    sf.lower[j] = v.lower;
    sf.upper[j] = v.upper;
    sf.cost[j] = v.objective;
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(model.num_nonzeros());
  for (int i = 0; i < sf.rows; ++i) {
    const Constraint& c = model.constraints()[i];
    for (const Term& t : c.terms) {
      if (t.coef != 0.0) trip.emplace_back(i, t.var.index, t.coef);
    }
    double lo = -kInf;
    double hi = kInf;
    switch (c.relation) {
      case Relation::kLessEqual: hi = c.rhs; break;
      case Relation::kGreaterEqual: lo = c.rhs; break;
      case Relation::kEqual: lo = hi = c.rhs; break;
    }
    sf.lower[n + i] = lo;
    sf.upper[n + i] = hi;
  }
  sf.a.resize(sf.rows, n);
  sf.a.setFromTriplets(trip.begin(), trip.end());
  sf.a.prune(0.0);
  sf.a.makeCompressed();
  return sf;
}

namespace {

enum class Position : unsigned char { kBasic, kLower, kUpper, kFree };

class Engine {
 public:
  Engine(const StandardForm& sf, BasisFactor& factor, const EngineOptions& opt)
      : sf_(sf), factor_(factor), opt_(opt), m_(sf.rows), n_(sf.structurals),
        total_(sf.columns()) {
    max_iter_ = opt.max_iterations > 0
                    ? opt.max_iterations
                    : 50 * static_cast<std::int64_t>(total_) + 10000;
  }

  EngineResult run() {
    initialize();
    factorize_or_repair();
    bool verified = false;
    Eigen::VectorXd y(m_);
    Eigen::VectorXd cb(m_);
    Eigen::VectorXd alpha(m_);

    while (true) {
      if (iter_ >= max_iter_) {
        throw SolverError("simplex iteration limit " + std::to_string(max_iter_) +
                          " reached (rows=" + std::to_string(m_) +
                          ", columns=" + std::to_string(n_) + ")");
      }
      if (factor_.updates_since_factorize() >= opt_.refactor_interval) {
        factorize_or_repair();
      }

      const bool phase1 = phase_costs(cb);
      y = cb;
      factor_.btran(y);

      double dq = 0.0;
      const int q = choose_entering(y, phase1, dq);
      if (q < 0) {
        if (!verified && factor_.updates_since_factorize() > 0) {
          factorize_or_repair();
          verified = true;
          continue;
        }
        if (phase1) return finish(Status::kInfeasible, y);
        return finish(Status::kOptimal, y);
      }
      verified = false;

      const int dir = dq < 0.0 ? 1 : -1;
      column(q, alpha);
      factor_.ftran(alpha);

      int leave = -1;
      double step = 0.0;
      bool flip = false;
      double leave_bound = 0.0;
      ratio_test(q, dir, alpha, phase1, leave, step, flip, leave_bound);

      if (!flip && leave < 0) {
        if (!phase1) return finish(Status::kUnbounded, y);
        // Phase 1 is bounded below; a missing blocker means the factorization
        // drifted. Refactorize once before giving up.
        if (factor_.updates_since_factorize() > 0) {
          factorize_or_repair();
          continue;
        }
        throw SolverError("phase 1 ray without blocking variable (numerical failure)");
      }

      apply_step(q, dir, step, alpha);
      if (flip) {
        pos_[q] = dir > 0 ? Position::kUpper : Position::kLower;
        x_[q] = dir > 0 ? sf_.upper[q] : sf_.lower[q];
      } else {
        const int jl = head_[leave];
        x_[jl] = leave_bound;
        pos_[jl] = (leave_bound == sf_.lower[jl]) ? Position::kLower : Position::kUpper;
        basic_slot_[jl] = -1;
        head_[leave] = q;
        basic_slot_[q] = leave;
        pos_[q] = Position::kBasic;
        factor_.update(leave, alpha);
      }

      if (step <= 1e-12) {
        if (++degenerate_run_ > std::max(2000, m_)) bland_ = true;
      } else {
        degenerate_run_ = 0;
        bland_ = false;
      }
      ++iter_;
    }
  }

 private:
  void initialize() {
    x_.setZero(total_);
    pos_.assign(total_, Position::kFree);
    basic_slot_.assign(total_, -1);
    head_.resize(m_);
    for (int j = 0; j < n_; ++j) place_at_bound(j);
    for (int i = 0; i < m_; ++i) {
      head_[i] = n_ + i;
      basic_slot_[n_ + i] = i;
      pos_[n_ + i] = Position::kBasic;
    }
  }

  void place_at_bound(int j) {
    const double lo = sf_.lower[j];
    const double hi = sf_.upper[j];
    if (std::isfinite(lo) && std::isfinite(hi)) {
      const bool upper = std::abs(hi) < std::abs(lo);
      pos_[j] = upper ? Position::kUpper : Position::kLower;
      x_[j] = upper ? hi : lo;
    } else if (std::isfinite(lo)) {
      pos_[j] = Position::kLower;
      x_[j] = lo;
    } else if (std::isfinite(hi)) {
      pos_[j] = Position::kUpper;
      x_[j] = hi;
    } else {
      pos_[j] = Position::kFree;
      x_[j] = 0.0;
    }
  }

  void factorize_or_repair() {
    if (!factor_.factorize(sf_, head_)) {
      // Singular basis: fall back to the all-logical basis. Structurals keep
      // their position at a bound; interior values are snapped.
      for (int p = 0; p < m_; ++p) {
        const int j = head_[p];
        basic_slot_[j] = -1;
        place_at_bound(j);
      }
      for (int i = 0; i < m_; ++i) {
        const int j = n_ + i;
        head_[i] = j;
        basic_slot_[j] = i;
        pos_[j] = Position::kBasic;
      }
      ++repairs_;
      if (repairs_ > 20 || !factor_.factorize(sf_, head_)) {
        throw SolverError("basis factorization failed repeatedly");
      }
    }
    recompute_basics();
  }

  void recompute_basics() {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < total_; ++j) {
      if (pos_[j] == Position::kBasic || x_[j] == 0.0) continue;
      if (j < n_) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(sf_.a, j); it; ++it) {
          rhs[it.row()] -= it.value() * x_[j];
        }
      } else {
        rhs[j - n_] += x_[j];
      }
    }
    factor_.ftran(rhs);
    for (int p = 0; p < m_; ++p) x_[head_[p]] = rhs[p];
  }

  void column(int j, Eigen::VectorXd& out) const {
    out.setZero(m_);
    if (j < n_) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(sf_.a, j); it; ++it) {
        out[it.row()] = it.value();
      }
    } else {
      out[j - n_] = -1.0;
    }
  }

  double column_dot(int j, const Eigen::VectorXd& y) const {
    if (j >= n_) return -y[j - n_];
    double s = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(sf_.a, j); it; ++it) {
      s += it.value() * y[it.row()];
    }
    return s;
  }

  // Fills basic costs; returns true while some basic variable is infeasible.
  bool phase_costs(Eigen::VectorXd& cb) const {
    bool infeasible = false;
    for (int p = 0; p < m_; ++p) {
      const int j = head_[p];
      const double v = x_[j];
      if (v < sf_.lower[j] - opt_.primal_tol) {
        cb[p] = -1.0;
        infeasible = true;
      } else if (v > sf_.upper[j] + opt_.primal_tol) {
        cb[p] = 1.0;
        infeasible = true;
      } else {
        cb[p] = 0.0;
      }
    }
    if (!infeasible) {
      for (int p = 0; p < m_; ++p) cb[p] = sf_.cost[head_[p]];
    }
    return infeasible;
  }

  int choose_entering(const Eigen::VectorXd& y, bool phase1, double& dq) const {
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < total_; ++j) {
      const Position p = pos_[j];
      if (p == Position::kBasic) continue;
      if (sf_.lower[j] == sf_.upper[j]) continue;
      const double d = (phase1 ? 0.0 : sf_.cost[j]) - column_dot(j, y);
      bool eligible = false;
      switch (p) {
        case Position::kLower: eligible = d < -opt_.dual_tol; break;
        case Position::kUpper: eligible = d > opt_.dual_tol; break;
        case Position::kFree: eligible = std::abs(d) > opt_.dual_tol; break;
        case Position::kBasic: break;
      }
      if (!eligible) continue;
      if (bland_) {
        dq = d;
        return j;
      }
      const double score = std::abs(d);
      if (score > best_score) {
        best_score = score;
        best = j;
        dq = d;
      }
    }
    return best;
  }

  // Bound a basic variable moving at `rate` runs into, or NaN when none.
  double blocking_bound(int j, double rate, bool phase1) const {
    const double v = x_[j];
    const double lo = sf_.lower[j];
    const double hi = sf_.upper[j];
    const double tol = opt_.primal_tol;
    if (rate < 0.0) {
      if (phase1 && v > hi + tol) return hi;
      if (v >= lo - tol && std::isfinite(lo)) return lo;
    } else {
      if (phase1 && v < lo - tol) return lo;
      if (v <= hi + tol && std::isfinite(hi)) return hi;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  void ratio_test(int q, int dir, const Eigen::VectorXd& alpha, bool phase1, int& leave,
                  double& step, bool& flip, double& leave_bound) const {
    const double tol = opt_.primal_tol;
    const double range = sf_.upper[q] - sf_.lower[q];

    if (bland_) {
      // Textbook minimum ratio with smallest-index tie break.
      double best = kInf;
      for (int p = 0; p < m_; ++p) {
        const double a = alpha[p];
        if (std::abs(a) <= opt_.pivot_tol) continue;
        const double rate = -dir * a;
        const int j = head_[p];
        const double b = blocking_bound(j, rate, phase1);
        if (std::isnan(b)) continue;
        const double t = std::max(0.0, (b - x_[j]) / rate);
        if (t < best - 1e-12 || (t <= best + 1e-12 && leave >= 0 && j < head_[leave])) {
          best = t;
          leave = p;
          leave_bound = b;
        }
      }
      if (std::isfinite(range) && range <= best) {
        flip = true;
        leave = -1;
        step = range;
      } else {
        step = best;
      }
      return;
    }

    // Harris two-pass ratio test.
    double relaxed = kInf;
    for (int p = 0; p < m_; ++p) {
      const double a = alpha[p];
      if (std::abs(a) <= opt_.pivot_tol) continue;
      const double rate = -dir * a;
      const int j = head_[p];
      const double b = blocking_bound(j, rate, phase1);
      if (std::isnan(b)) continue;
      const double t = rate < 0.0 ? (x_[j] - b + tol) / -rate : (b + tol - x_[j]) / rate;
      relaxed = std::min(relaxed, t);
    }
    if (std::isfinite(range) && range <= relaxed) {
      flip = true;
      step = range;
      return;
    }
    if (!std::isfinite(relaxed)) return;

    double best_pivot = 0.0;
    for (int p = 0; p < m_; ++p) {
      const double a = alpha[p];
      if (std::abs(a) <= opt_.pivot_tol) continue;
      const double rate = -dir * a;
      const int j = head_[p];
      const double b = blocking_bound(j, rate, phase1);
      if (std::isnan(b)) continue;
      const double t = std::max(0.0, (b - x_[j]) / rate);
      if (t <= relaxed && std::abs(a) > best_pivot) {
        best_pivot = std::abs(a);
        leave = p;
        step = t;
        leave_bound = b;
      }
    }
  }

  void apply_step(int q, int dir, double step, const Eigen::VectorXd& alpha) {
    if (step == 0.0) return;
    x_[q] += dir * step;
    for (int p = 0; p < m_; ++p) {
      if (alpha[p] != 0.0) x_[head_[p]] -= dir * step * alpha[p];
    }
  }

  EngineResult finish(Status status, const Eigen::VectorXd& y) {
    EngineResult r;
    r.status = status;
    r.iterations = iter_;
    r.x = x_;
    r.y = y;
    r.d.resize(total_);
    for (int j = 0; j < total_; ++j) {
      r.d[j] = pos_[j] == Position::kBasic ? 0.0 : sf_.cost[j] - column_dot(j, y);
    }
    return r;
  }

  const StandardForm& sf_;
  BasisFactor& factor_;
  const EngineOptions opt_;
  const int m_;
  const int n_;
  const int total_;
  std::int64_t max_iter_ = 0;
  std::int64_t iter_ = 0;
  int degenerate_run_ = 0;
  int repairs_ = 0;
  bool bland_ = false;

  Eigen::VectorXd x_;
  std::vector<Position> pos_;
  std::vector<int> basic_slot_;
  std::vector<int> head_;
};

}  // namespace

EngineResult run_simplex(const StandardForm& sf, BasisFactor& factor,
                         const EngineOptions& options) {
  return Engine(sf, factor, options).run();
}

}  // namespace dcflex::lp::detail
