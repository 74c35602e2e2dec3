#include "parastab/feedback.hpp"

#include <cmath>

namespace parastab {

FeedbackOperator::FeedbackOperator(SubspacePair pair, double lambda)
    : pair_(std::move(pair)), lambda_(lambda) {
  if (lambda < 0.0) throw std::invalid_argument("FeedbackOperator: lambda must be >= 0");
  const int m = pair_.dim();
  const auto& alpha = pair_.basis().eigenvalues;
  const DenseLu lu(pair_.gram());

  // K z = U d with d = -lambda G^-T G_E diag(alpha) G^-1 (Psi_i, z);
  // the A-action on span(E_M) is diagonal in the analytic eigenbasis.
  DenseMatrix ginv_scaled(m, m);  // diag(alpha) G^-1
  std::vector<double> e(static_cast<size_t>(m), 0.0);
  for (int j = 0; j < m; ++j) {
    e[static_cast<size_t>(j)] = 1.0;
    const std::vector<double> x = lu.solve(e);
    e[static_cast<size_t>(j)] = 0.0;
    for (int i = 0; i < m; ++i) ginv_scaled.at(i, j) = alpha[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
  }
  const DenseMatrix t = matmul(pair_.gram_E(), ginv_scaled);
  coeff_map_ = DenseMatrix(m, m);
  std::vector<double> col(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) col[static_cast<size_t>(i)] = t.at(i, j);
    const std::vector<double> x = lu.solve_transposed(col);
    for (int i = 0; i < m; ++i) coeff_map_.at(i, j) = -lambda_ * x[static_cast<size_t>(i)];
  }
}

void FeedbackOperator::apply_into(const Field& z, Field& out) const {
  const int m = pair_.dim();
  std::vector<double> moments(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    moments[static_cast<size_t>(i)] = l2_inner(pair_.actuators().fields[static_cast<size_t>(i)], z);
  }
  std::vector<double> d(static_cast<size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += coeff_map_.at(i, j) * moments[static_cast<size_t>(j)];
    d[static_cast<size_t>(i)] = s;
  }
  if (out.size() != z.size()) out = Field(pair_.mesh());
  std::fill(out.values.begin(), out.values.end(), 0.0);
  for (int i = 0; i < m; ++i) {
    const Field& psi = pair_.actuators().fields[static_cast<size_t>(i)];
    const double c = d[static_cast<size_t>(i)];
    for (int k = 0; k < out.size(); ++k) out[k] += c * psi[k];
  }
}

Field FeedbackOperator::apply(const Field& z) const {
  Field out(pair_.mesh());
  apply_into(z, out);
  return out;
}

double FeedbackOperator::operator_norm() const {
  const int m = pair_.dim();
  // K = U C U^T M with C = coeff_map; in the mass norm
  // ||K||^2 = lambda_max(G_U^1/2 C G_U C^T G_U^1/2).
  const DenseMatrix& g_u = pair_.gram_U();
  DenseMatrix r = sym_sqrt(g_u);
  DenseMatrix inner = matmul(matmul(coeff_map_, g_u), coeff_map_.transposed());
  DenseMatrix s = matmul(matmul(r, inner), r);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double v = 0.5 * (s.at(i, j) + s.at(j, i));
      s.at(i, j) = v;
      s.at(j, i) = v;
    }
  const std::vector<double> ev = sym_eigenvalues(s);
  return std::sqrt(std::max(ev.back(), 0.0));
}

FeedbackOperator::BoundReport FeedbackOperator::certify_bounds() const {
  BoundReport report;
  report.dim = pair_.dim();
  report.lambda = lambda_;
  report.alpha_hat = pair_.basis().alpha_hat();
  report.c_p = pair_.estimate_C_P();
  report.computed_norm = operator_norm();
  report.bound = lambda_ * report.alpha_hat * report.c_p * report.c_p;
  report.margin = report.bound - report.computed_norm;
  return report;
}

FeedbackOperator build_feedback(SubspacePair pair, double lambda) {
  return FeedbackOperator(std::move(pair), lambda);
}

SufficiencyMargins sufficiency_margins(double gamma1, double gamma2, double lambda,
                                       double beta_Mplus, double c_rc, double alpha1) {
  if (!(gamma1 > 0.0 && gamma1 < 2.0)) throw std::invalid_argument("gamma1 must lie in (0,2)");
  if (!(gamma2 > 0.0 && gamma2 < 1.0)) throw std::invalid_argument("gamma2 must lie in (0,1)");
  SufficiencyMargins out;
  out.xi_1 = (2.0 - gamma1) * (1.0 - gamma2) * beta_Mplus * beta_Mplus -
             2.0 / gamma1 * c_rc * c_rc;
  out.xi_2 = (2.0 * lambda - (2.0 - gamma1) * (1.0 / gamma2 - 1.0)) * alpha1 * alpha1 -
             2.0 / gamma1 * c_rc * c_rc;
  return out;
}

}  // namespace parastab
