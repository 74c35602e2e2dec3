#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "parastab/dense.hpp"
#include "parastab/fem.hpp"

namespace parastab {

struct SingularGramError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Indicator-function actuators on equally spaced interior intervals.
/// The j-th support is (c_j - r/(2M), c_j + r/(2M)) with c_j = (2j-1)/(2M),
/// so the total covered length is r for every M. Each indicator is stored
/// as the L2 projection onto the P1 space (exact element-wise integration,
/// partial elements get proportional weight), which keeps inner products
/// against P1 fields exact.
struct ActuatorSet {
  int count = 0;
  double support_ratio = 0.0;
  Mesh mesh;
  std::vector<std::pair<double, double>> intervals;
  std::vector<Field> fields;
};

ActuatorSet make_actuators(int count, double support_ratio, const Mesh& mesh);

/// First eigenfunctions of -nu*Laplace + 1 under the homogeneous boundary
/// condition of the mesh, sampled at the nodes. Neumann: cos((j-1) pi x)
/// with alpha_j = nu ((j-1) pi)^2 + 1; Dirichlet: sin(j pi x) with
/// alpha_j = nu (j pi)^2 + 1.
struct EigenBasis {
  int count = 0;
  double nu = 0.0;
  Mesh mesh;
  std::vector<Field> fields;
  std::vector<double> eigenvalues;

  double alpha_hat() const { return eigenvalues.back(); }
};

EigenBasis make_eigenbasis(int count, double nu, Bc bc, const Mesh& mesh);

/// An actuator space U_M paired with a spectral space E_M of the same
/// dimension, together with the Gram matrices that realize the oblique
/// projections onto U_M along the L2-orthogonal complement of E_M and
/// onto E_M along the complement of U_M.
class SubspacePair {
 public:
  SubspacePair(ActuatorSet actuators, EigenBasis basis);

  int dim() const { return actuators_.count; }
  const ActuatorSet& actuators() const { return actuators_; }
  const EigenBasis& basis() const { return basis_; }
  const Mesh& mesh() const { return actuators_.mesh; }

  const DenseMatrix& gram() const { return gram_; }          // (Psi_i, e_j)
  const DenseMatrix& gram_U() const { return gram_U_; }      // (Psi_i, Psi_j)
  const DenseMatrix& gram_E() const { return gram_E_; }      // (e_i, e_j)
  double gram_condition() const { return gram_condition_; }

  /// Coefficients of the projection onto span(E_M) along U_M-orthogonality:
  /// solves G c = (Psi_i, h).
  std::vector<double> project_E_coefficients(const Field& h) const;
  Field project_E_along_Uperp(const Field& h) const;

  /// Projection onto span(U_M) along the orthogonal complement of E_M:
  /// solves G^T d = (e_j, h).
  Field project_U_along_Eperp(const Field& h) const;

  /// Orthogonal projection onto span(E_M).
  Field orth_project_E(const Field& h) const;

  /// Discrete L2 operator norm of the oblique projection onto U_M.
  double estimate_C_P() const;

  Field combine_actuators(const std::vector<double>& coeff) const;
  Field combine_basis(const std::vector<double>& coeff) const;

 private:
  ActuatorSet actuators_;
  EigenBasis basis_;
  DenseMatrix gram_, gram_U_, gram_E_;
  std::shared_ptr<const DenseLu> gram_lu_;
  std::shared_ptr<const DenseLu> gram_E_lu_;
  double gram_condition_ = 0.0;
};

SubspacePair build_pair(ActuatorSet actuators, EigenBasis basis);

/// Poincare-like constant: min ||h||_V / ||h||_L2 over discrete fields with
/// (Psi_i, h) = 0 for every actuator, where ||h||_V^2 = h^T (nu K + M) h.
/// Computed by power iteration on the deflated inverse pencil; tolerance
/// 1e-8 on the Rayleigh quotient. An empty actuator set gives the
/// unconstrained minimum (1 under Neumann).
double estimate_beta_Mplus(const ActuatorSet& actuators, const Mesh& mesh, double nu);

}  // namespace parastab
