#pragma once

#include <stdexcept>
#include <vector>

namespace parastab {

struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Row-major dense matrix for the small (M x M) subspace systems.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

  double& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  DenseMatrix transposed() const;
};

DenseMatrix matmul(const DenseMatrix& x, const DenseMatrix& y);

/// LU factorization with partial pivoting.
class DenseLu {
 public:
  explicit DenseLu(DenseMatrix m);

  std::vector<double> solve(const std::vector<double>& rhs) const;
  std::vector<double> solve_transposed(const std::vector<double>& rhs) const;
  DenseMatrix inverse() const;

  /// 1-norm condition estimate ||A||_1 * ||A^-1||_1 (exact for these sizes).
  double condition() const;

 private:
  int n_ = 0;
  DenseMatrix lu_;
  std::vector<int> perm_;
  double norm1_ = 0.0;
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi, ascending.
std::vector<double> sym_eigenvalues(DenseMatrix m);

/// Symmetric positive semidefinite square root via Jacobi.
DenseMatrix sym_sqrt(const DenseMatrix& m);

}  // namespace parastab
