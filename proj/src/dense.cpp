#include "parastab/dense.hpp"

#include <algorithm>
#include <cmath>

namespace parastab {

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
  return t;
}

DenseMatrix matmul(const DenseMatrix& x, const DenseMatrix& y) {
  if (x.cols != y.rows) throw std::invalid_argument("matmul: shape mismatch");
  DenseMatrix out(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i) {
    for (int k = 0; k < x.cols; ++k) {
      const double v = x.at(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) out.at(i, j) += v * y.at(k, j);
    }
  }
  return out;
}

namespace {

double norm1(const DenseMatrix& m) {
  double best = 0.0;
  for (int j = 0; j < m.cols; ++j) {
    double s = 0.0;
    for (int i = 0; i < m.rows; ++i) s += std::abs(m.at(i, j));
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

DenseLu::DenseLu(DenseMatrix m) : n_(m.rows), lu_(std::move(m)), perm_(static_cast<size_t>(n_)) {
  if (lu_.rows != lu_.cols) throw std::invalid_argument("DenseLu: matrix not square");
  norm1_ = norm1(lu_);
  for (int i = 0; i < n_; ++i) perm_[static_cast<size_t>(i)] = i;
  for (int k = 0; k < n_; ++k) {
    int pivot = k;
    double best = std::abs(lu_.at(k, k));
    for (int i = k + 1; i < n_; ++i) {
      const double v = std::abs(lu_.at(i, k));
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (best == 0.0) throw SingularMatrixError("DenseLu: exactly singular matrix");
    if (pivot != k) {
      for (int j = 0; j < n_; ++j) std::swap(lu_.at(k, j), lu_.at(pivot, j));
      std::swap(perm_[static_cast<size_t>(k)], perm_[static_cast<size_t>(pivot)]);
    }
    const double d = lu_.at(k, k);
    for (int i = k + 1; i < n_; ++i) {
      const double f = lu_.at(i, k) / d;
      lu_.at(i, k) = f;
      for (int j = k + 1; j < n_; ++j) lu_.at(i, j) -= f * lu_.at(k, j);
    }
  }
}

std::vector<double> DenseLu::solve(const std::vector<double>& rhs) const {
  std::vector<double> x(static_cast<size_t>(n_));
  for (int i = 0; i < n_; ++i) x[static_cast<size_t>(i)] = rhs[static_cast<size_t>(perm_[static_cast<size_t>(i)])];
  for (int i = 1; i < n_; ++i) {
    double s = x[static_cast<size_t>(i)];
    for (int j = 0; j < i; ++j) s -= lu_.at(i, j) * x[static_cast<size_t>(j)];
    x[static_cast<size_t>(i)] = s;
  }
  for (int i = n_ - 1; i >= 0; --i) {
    double s = x[static_cast<size_t>(i)];
    for (int j = i + 1; j < n_; ++j) s -= lu_.at(i, j) * x[static_cast<size_t>(j)];
    x[static_cast<size_t>(i)] = s / lu_.at(i, i);
  }
  return x;
}

std::vector<double> DenseLu::solve_transposed(const std::vector<double>& rhs) const {
  // A^T x = b  <=>  U^T L^T P x = b
  std::vector<double> y = rhs;
  for (int i = 0; i < n_; ++i) {
    double s = y[static_cast<size_t>(i)];
    for (int j = 0; j < i; ++j) s -= lu_.at(j, i) * y[static_cast<size_t>(j)];
    y[static_cast<size_t>(i)] = s / lu_.at(i, i);
  }
  for (int i = n_ - 1; i >= 0; --i) {
    double s = y[static_cast<size_t>(i)];
    for (int j = i + 1; j < n_; ++j) s -= lu_.at(j, i) * y[static_cast<size_t>(j)];
    y[static_cast<size_t>(i)] = s;
  }
  std::vector<double> x(static_cast<size_t>(n_));
  for (int i = 0; i < n_; ++i) x[static_cast<size_t>(perm_[static_cast<size_t>(i)])] = y[static_cast<size_t>(i)];
  return x;
}

DenseMatrix DenseLu::inverse() const {
  DenseMatrix inv(n_, n_);
  std::vector<double> e(static_cast<size_t>(n_), 0.0);
  for (int j = 0; j < n_; ++j) {
    e[static_cast<size_t>(j)] = 1.0;
    std::vector<double> col = solve(e);
    e[static_cast<size_t>(j)] = 0.0;
    for (int i = 0; i < n_; ++i) inv.at(i, j) = col[static_cast<size_t>(i)];
  }
  return inv;
}

double DenseLu::condition() const { return norm1_ * norm1(inverse()); }

std::vector<double> sym_eigenvalues(DenseMatrix m) {
  const int n = m.rows;
  double scale = 0.0;
  for (double v : m.a) scale += v * v;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double offdiag = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) offdiag += m.at(p, q) * m.at(p, q);
    if (offdiag <= 1e-28 * scale) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = m.at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (m.at(q, q) - m.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double mip = m.at(i, p);
          const double miq = m.at(i, q);
          m.at(i, p) = c * mip - s * miq;
          m.at(i, q) = s * mip + c * miq;
        }
        for (int i = 0; i < n; ++i) {
          const double mpi = m.at(p, i);
          const double mqi = m.at(q, i);
          m.at(p, i) = c * mpi - s * mqi;
          m.at(q, i) = s * mpi + c * mqi;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<size_t>(i)] = m.at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

DenseMatrix sym_sqrt(const DenseMatrix& m) {
  const int n = m.rows;
  DenseMatrix a = m;
  double scale = 0.0;
  for (double x : a.a) scale += x * x;
  DenseMatrix v(n, n);
  for (int i = 0; i < n; ++i) v.at(i, i) = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double offdiag = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) offdiag += a.at(p, q) * a.at(p, q);
    if (offdiag <= 1e-28 * scale) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = a.at(i, p);
          const double aiq = a.at(i, q);
          a.at(i, p) = c * aip - s * aiq;
          a.at(i, q) = s * aip + c * aiq;
          const double vip = v.at(i, p);
          const double viq = v.at(i, q);
          v.at(i, p) = c * vip - s * viq;
          v.at(i, q) = s * vip + c * viq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = a.at(p, i);
          const double aqi = a.at(q, i);
          a.at(p, i) = c * api - s * aqi;
          a.at(q, i) = s * api + c * aqi;
        }
      }
    }
  }
  DenseMatrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        const double lam = std::max(a.at(k, k), 0.0);
        s += v.at(i, k) * std::sqrt(lam) * v.at(j, k);
      }
      out.at(i, j) = s;
    }
  }
  return out;
}

}  // namespace parastab
