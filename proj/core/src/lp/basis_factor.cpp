#include <Eigen/LU>
#include <Eigen/SparseLU>

#include "simplex.hpp"

namespace dcflex::lp::detail {
namespace {

Eigen::SparseMatrix<double> basis_matrix(const StandardForm& sf,
                                         const std::vector<int>& head) {
  const int m = sf.rows;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m) * 3);
  for (int p = 0; p < m; ++p) {
    const int j = head[p];
    if (j < sf.structurals) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(sf.a, j); it; ++it) {
        trip.emplace_back(static_cast<int>(it.row()), p, it.value());
      }
    } else {
      trip.emplace_back(j - sf.structurals, p, -1.0);
    }
  }
  Eigen::SparseMatrix<double> b(m, m);
  b.setFromTriplets(trip.begin(), trip.end());
  b.makeCompressed();
  return b;
}

// Explicit inverse kept current by elementary row operations.
class DenseFactor final : public BasisFactor {
 public:
  bool factorize(const StandardForm& sf, const std::vector<int>& head) override {
    const Eigen::MatrixXd b = Eigen::MatrixXd(basis_matrix(sf, head));
    updates_ = 0;
    if (b.rows() == 0) {
      inv_.resize(0, 0);
      return true;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
    lu.setThreshold(1e-11);
    if (!lu.isInvertible()) return false;
    inv_ = lu.inverse();
    return true;
  }

  void ftran(Eigen::VectorXd& v) const override { v = inv_ * v; }
  void btran(Eigen::VectorXd& v) const override { v = inv_.transpose() * v; }

  void update(int pos, const Eigen::VectorXd& alpha) override {
    const double pivot = alpha[pos];
    inv_.row(pos) /= pivot;
    const Eigen::RowVectorXd pivot_row = inv_.row(pos);
    for (Eigen::Index i = 0; i < inv_.rows(); ++i) {
      if (i != pos && alpha[i] != 0.0) inv_.row(i) -= alpha[i] * pivot_row;
    }
    ++updates_;
  }

  int updates_since_factorize() const override { return updates_; }

 private:
  Eigen::MatrixXd inv_;
  int updates_ = 0;
};

// Sparse LU of the last refactorized basis followed by a product-form eta file.
class SparseFactor final : public BasisFactor {
 public:
  bool factorize(const StandardForm& sf, const std::vector<int>& head) override {
    etas_.clear();
    m_ = sf.rows;
    if (m_ == 0) return true;
    const Eigen::SparseMatrix<double> b = basis_matrix(sf, head);
    lu_.analyzePattern(b);
    lu_.factorize(b);
    return lu_.info() == Eigen::Success;
  }

  void ftran(Eigen::VectorXd& v) const override {
    if (m_ == 0) return;
    Eigen::VectorXd w = lu_.solve(v);
    for (const Eta& e : etas_) {
      const double xr = w[e.pos] / e.pivot;
      if (xr != 0.0) {
        for (std::size_t k = 0; k < e.index.size(); ++k) w[e.index[k]] -= e.value[k] * xr;
      }
      w[e.pos] = xr;
    }
    v = std::move(w);
  }

  void btran(Eigen::VectorXd& v) const override {
    if (m_ == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = v[it->pos];
      for (std::size_t k = 0; k < it->index.size(); ++k) s -= it->value[k] * v[it->index[k]];
      v[it->pos] = s / it->pivot;
    }
    Eigen::VectorXd w = lu_.transpose().solve(v);
    v = std::move(w);
  }

  void update(int pos, const Eigen::VectorXd& alpha) override {
    Eta e;
    e.pos = pos;
    e.pivot = alpha[pos];
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
      if (i != pos && alpha[i] != 0.0) {
        e.index.push_back(static_cast<int>(i));
        e.value.push_back(alpha[i]);
      }
    }
    etas_.push_back(std::move(e));
  }

  int updates_since_factorize() const override { return static_cast<int>(etas_.size()); }

 private:
  struct Eta {
    int pos = 0;
    double pivot = 1.0;
    std::vector<int> index;
    std::vector<double> value;
  };

  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  int m_ = 0;
};

}  // namespace

std::unique_ptr<BasisFactor> make_dense_factor() { return std::make_unique<DenseFactor>(); }
std::unique_ptr<BasisFactor> make_sparse_factor() { return std::make_unique<SparseFactor>(); }

}  // namespace dcflex::lp::detail
