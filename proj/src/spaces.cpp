#include "parastab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace parastab {

namespace {

constexpr double kGramConditionLimit = 1e12;

/// Exact load vector b_i = integral of the indicator of (lo, hi) against
/// the hat function phi_i.
Field indicator_load(const Mesh& mesh, double lo, double hi) {
  Field load(mesh);
  const double h = mesh.h;
  for (int e = 0; e < mesh.n_nodes - 1; ++e) {
    const double xl = mesh.node(e);
    const double xr = mesh.node(e + 1);
    const double s = std::max(lo, xl);
    const double t = std::min(hi, xr);
    if (t <= s) continue;
    load[e] += ((xr - s) * (xr - s) - (xr - t) * (xr - t)) / (2.0 * h);
    load[e + 1] += ((t - xl) * (t - xl) - (s - xl) * (s - xl)) / (2.0 * h);
  }
  return load;
}

}  // namespace

ActuatorSet make_actuators(int count, double support_ratio, const Mesh& mesh) {
  if (count < 1) throw std::invalid_argument("make_actuators: need at least one actuator");
  if (!(support_ratio > 0.0 && support_ratio < 1.0)) {
    throw std::invalid_argument("make_actuators: support ratio must lie in (0,1)");
  }
  ActuatorSet set;
  set.count = count;
  set.support_ratio = support_ratio;
  set.mesh = mesh;
  const double half = support_ratio / (2.0 * count);
  TriDiagOperator mass = assemble_mass(mesh);
  for (int j = 1; j <= count; ++j) {
    const double c = (2.0 * j - 1.0) / (2.0 * count);
    const double lo = c - half;
    const double hi = c + half;
    set.intervals.emplace_back(lo, hi);
    set.fields.push_back(solve_spd(mass, indicator_load(mesh, lo, hi)));
  }
  return set;
}

EigenBasis make_eigenbasis(int count, double nu, Bc bc, const Mesh& mesh) {
  if (count < 1) throw std::invalid_argument("make_eigenbasis: need at least one function");
  if (!(nu > 0.0)) throw std::invalid_argument("make_eigenbasis: nu must be positive");
  EigenBasis basis;
  basis.count = count;
  basis.nu = nu;
  basis.mesh = mesh;
  const double pi = std::numbers::pi;
  for (int j = 1; j <= count; ++j) {
    const double freq = (bc == Bc::NeumannHomogeneous) ? (j - 1) * pi : j * pi;
    basis.fields.push_back(sample(mesh, [&](double x) {
      return (bc == Bc::NeumannHomogeneous) ? std::cos(freq * x) : std::sin(freq * x);
    }));
    basis.eigenvalues.push_back(nu * freq * freq + 1.0);
  }
  return basis;
}

SubspacePair::SubspacePair(ActuatorSet actuators, EigenBasis basis)
    : actuators_(std::move(actuators)), basis_(std::move(basis)) {
  const int m = actuators_.count;
  if (m < 1 || basis_.count != m) {
    throw std::invalid_argument("SubspacePair: spaces must share dimension >= 1");
  }
  if (!(actuators_.mesh == basis_.mesh)) {
    throw MeshMismatchError("SubspacePair: actuator/basis mesh mismatch");
  }
  gram_ = DenseMatrix(m, m);
  gram_U_ = DenseMatrix(m, m);
  gram_E_ = DenseMatrix(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      gram_.at(i, j) = l2_inner(actuators_.fields[static_cast<size_t>(i)],
                                basis_.fields[static_cast<size_t>(j)]);
      gram_U_.at(i, j) = l2_inner(actuators_.fields[static_cast<size_t>(i)],
                                  actuators_.fields[static_cast<size_t>(j)]);
      gram_E_.at(i, j) = l2_inner(basis_.fields[static_cast<size_t>(i)],
                                  basis_.fields[static_cast<size_t>(j)]);
    }
  }
  try {
    gram_lu_ = std::make_shared<const DenseLu>(gram_);
    gram_E_lu_ = std::make_shared<const DenseLu>(gram_E_);
  } catch (const SingularMatrixError&) {
    throw SingularGramError("SubspacePair: U_M and E_M do not form a direct sum");
  }
  gram_condition_ = gram_lu_->condition();
  if (!(gram_condition_ < kGramConditionLimit)) {
    throw SingularGramError("SubspacePair: Gram matrix numerically singular, cond = " +
                            std::to_string(gram_condition_));
  }
}

SubspacePair build_pair(ActuatorSet actuators, EigenBasis basis) {
  return SubspacePair(std::move(actuators), std::move(basis));
}

std::vector<double> SubspacePair::project_E_coefficients(const Field& h) const {
  const int m = dim();
  std::vector<double> rhs(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) rhs[static_cast<size_t>(i)] = l2_inner(actuators_.fields[static_cast<size_t>(i)], h);
  return gram_lu_->solve(rhs);
}

Field SubspacePair::combine_actuators(const std::vector<double>& coeff) const {
  Field out(mesh());
  for (int i = 0; i < dim(); ++i) {
    const Field& psi = actuators_.fields[static_cast<size_t>(i)];
    const double c = coeff[static_cast<size_t>(i)];
    for (int k = 0; k < out.size(); ++k) out[k] += c * psi[k];
  }
  return out;
}

Field SubspacePair::combine_basis(const std::vector<double>& coeff) const {
  Field out(mesh());
  for (int j = 0; j < dim(); ++j) {
    const Field& e = basis_.fields[static_cast<size_t>(j)];
    const double c = coeff[static_cast<size_t>(j)];
    for (int k = 0; k < out.size(); ++k) out[k] += c * e[k];
  }
  return out;
}

Field SubspacePair::project_E_along_Uperp(const Field& h) const {
  return combine_basis(project_E_coefficients(h));
}

Field SubspacePair::project_U_along_Eperp(const Field& h) const {
  const int m = dim();
  std::vector<double> rhs(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) rhs[static_cast<size_t>(j)] = l2_inner(basis_.fields[static_cast<size_t>(j)], h);
  return combine_actuators(gram_lu_->solve_transposed(rhs));
}

Field SubspacePair::orth_project_E(const Field& h) const {
  const int m = dim();
  std::vector<double> rhs(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) rhs[static_cast<size_t>(j)] = l2_inner(basis_.fields[static_cast<size_t>(j)], h);
  return combine_basis(gram_E_lu_->solve(rhs));
}

double SubspacePair::estimate_C_P() const {
  const int m = dim();
  // ||P||^2 = lambda_max(G_E^1/2 G^-1 G_U G^-T G_E^1/2) in the mass-weighted norm
  DenseMatrix y(m, m);  // G^-1 G_U
  std::vector<double> col(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) col[static_cast<size_t>(i)] = gram_U_.at(i, j);
    std::vector<double> x = gram_lu_->solve(col);
    for (int i = 0; i < m; ++i) y.at(i, j) = x[static_cast<size_t>(i)];
  }
  DenseMatrix z(m, m);  // Y G^-T  via  Z^T = G^-1 Y^T
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) col[static_cast<size_t>(i)] = y.at(j, i);
    std::vector<double> x = gram_lu_->solve(col);
    for (int i = 0; i < m; ++i) z.at(j, i) = x[static_cast<size_t>(i)];
  }
  DenseMatrix r = sym_sqrt(gram_E_);
  DenseMatrix s = matmul(matmul(r, z), r);
  // enforce symmetry lost to roundoff
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double v = 0.5 * (s.at(i, j) + s.at(j, i));
      s.at(i, j) = v;
      s.at(j, i) = v;
    }
  const std::vector<double> ev = sym_eigenvalues(s);
  return std::sqrt(std::max(ev.back(), 0.0));
}

double estimate_beta_Mplus(const ActuatorSet& actuators, const Mesh& mesh, double nu) {
  const int m = actuators.count;
  const TriDiagOperator mass = assemble_mass(mesh);
  const TriDiagOperator a_op = assemble_A(mesh, nu);
  const TriDiagFactorization a_fac(a_op);

  // Precompute W_i = A^-1 M Psi_i and the Schur complement S = Psi^T M W.
  std::vector<Field> w;
  std::unique_ptr<DenseLu> schur;
  if (m > 0) {
    DenseMatrix s(m, m);
    for (int i = 0; i < m; ++i) {
      w.push_back(a_fac.solve(mass.apply(actuators.fields[static_cast<size_t>(i)])));
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        s.at(i, j) = l2_inner(actuators.fields[static_cast<size_t>(i)], w[static_cast<size_t>(j)]);
    schur = std::make_unique<DenseLu>(s);
  }

  // Power iteration for the largest eigenvalue rho of the map
  // x -> (I - W S^-1 Psi^T M) A^-1 M x, whose eigenpairs on the constrained
  // subspace solve A h = beta^2 M h + multipliers; beta = rho^-1/2.
  Field x(mesh);
  for (int i = 0; i < x.size(); ++i) {
    x[i] = 1.0 + std::sin(17.0 * mesh.node(i) + 0.63) + 0.3 * std::cos(41.0 * mesh.node(i));
  }
  double rho = 0.0;
  const int max_iter = 20000;
  for (int it = 0; it < max_iter; ++it) {
    Field y = a_fac.solve(mass.apply(x));
    if (m > 0) {
      std::vector<double> rhs(static_cast<size_t>(m));
      for (int i = 0; i < m; ++i) rhs[static_cast<size_t>(i)] = l2_inner(actuators.fields[static_cast<size_t>(i)], y);
      const std::vector<double> mu = schur->solve(rhs);
      for (int i = 0; i < m; ++i) {
        const Field& wi = w[static_cast<size_t>(i)];
        const double c = mu[static_cast<size_t>(i)];
        for (int k = 0; k < y.size(); ++k) y[k] -= c * wi[k];
      }
    }
    const double next = l2_inner(x, y);  // Rayleigh quotient for unit x
    const double norm = l2_norm(y);
    if (!(norm > 0.0)) throw std::runtime_error("estimate_beta_Mplus: iteration collapsed");
    for (int k = 0; k < y.size(); ++k) y[k] /= norm;
    x = std::move(y);
    if (it > 2 && std::abs(next - rho) <= 1e-12 * std::abs(next)) {
      rho = next;
      break;
    }
    rho = next;
  }
  return 1.0 / std::sqrt(rho);
}

}  // namespace parastab
