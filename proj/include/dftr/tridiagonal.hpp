#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>

namespace dftr {

/// Tridiagonal matrix stored by diagonals.
///
/// `lower[i]` multiplies x[i-1] in row i (lower[0] unused), `upper[i]`
/// multiplies x[i+1] in row i (upper[n-1] unused).
template <typename Scalar>
struct Tridiagonal {
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  VectorType lower;
  VectorType diag;
  VectorType upper;

  explicit Tridiagonal(Eigen::Index n = 0)
      : lower(VectorType::Zero(n)), diag(VectorType::Zero(n)), upper(VectorType::Zero(n)) {}

  Eigen::Index size() const { return diag.size(); }

  VectorType apply(const Eigen::Ref<const VectorType>& x) const {
    const Eigen::Index n = size();
    VectorType y = diag.cwiseProduct(x);
    y.tail(n - 1) += lower.tail(n - 1).cwiseProduct(x.head(n - 1));
    y.head(n - 1) += upper.head(n - 1).cwiseProduct(x.tail(n - 1));
    return y;
  }

  /// alpha * I + beta * this
  Tridiagonal shifted(Scalar alpha, Scalar beta) const {
    Tridiagonal out(size());
    out.lower = beta * lower;
    out.upper = beta * upper;
    out.diag = VectorType::Constant(size(), alpha) + beta * diag;
    return out;
  }

  MatrixType dense() const {
    const Eigen::Index n = size();
    MatrixType m = MatrixType::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = diag[i];
      if (i > 0) m(i, i - 1) = lower[i];
      if (i + 1 < n) m(i, i + 1) = upper[i];
    }
    return m;
  }
};

/// LU factorization of a tridiagonal matrix without pivoting (Thomas algorithm).
///
/// Factor once, solve many times; used for the Crank-Nicolson left-hand side.
template <typename Scalar>
class ThomasSolver {
 public:
  using VectorType = typename Tridiagonal<Scalar>::VectorType;

  explicit ThomasSolver(const Tridiagonal<Scalar>& m)
      : lower_(m.lower), upper_(m.upper), pivot_(m.size()) {
    const Eigen::Index n = m.size();
    pivot_[0] = m.diag[0];
    check_pivot(0);
    for (Eigen::Index i = 1; i < n; ++i) {
      lower_[i] = m.lower[i] / pivot_[i - 1];
      pivot_[i] = m.diag[i] - lower_[i] * upper_[i - 1];
      check_pivot(i);
    }
  }

  VectorType solve(const Eigen::Ref<const VectorType>& rhs) const {
    const Eigen::Index n = pivot_.size();
    VectorType x(n);
    x[0] = rhs[0];
    for (Eigen::Index i = 1; i < n; ++i) x[i] = rhs[i] - lower_[i] * x[i - 1];
    x[n - 1] /= pivot_[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i) x[i] = (x[i] - upper_[i] * x[i + 1]) / pivot_[i];
    return x;
  }

 private:
  void check_pivot(Eigen::Index i) const {
    using std::abs;
    if (!(abs(pivot_[i]) > Scalar(0))) {
      throw std::domain_error("zero pivot in tridiagonal solve at row " + std::to_string(i));
    }
  }

  VectorType lower_;
  VectorType upper_;
  VectorType pivot_;
};

}  // namespace dftr
