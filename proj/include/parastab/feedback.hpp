#pragma once

#include "parastab/spaces.hpp"

namespace parastab {

/// The stabilizing map z -> -lambda P_U A P_E z, a finite-rank operator with
/// range in the actuator span. Applying it to the difference between the
/// controlled and the target state and adding the result to the right-hand
/// side makes the closed loop dissipative.
class FeedbackOperator {
 public:
  FeedbackOperator(SubspacePair pair, double lambda);

  double lambda() const { return lambda_; }
  const SubspacePair& pair() const { return pair_; }

  Field apply(const Field& z) const;
  void apply_into(const Field& z, Field& out) const;

  /// Discrete L2 operator norm of the composed map.
  double operator_norm() const;

  struct BoundReport {
    int dim;
    double lambda;
    double alpha_hat;
    double c_p;
    double computed_norm;
    double bound;   // lambda * alpha_hat * C_P^2
    double margin;  // bound - computed_norm
  };
  BoundReport certify_bounds() const;

 private:
  SubspacePair pair_;
  double lambda_;
  DenseMatrix coeff_map_;  // actuator moments of z -> actuator coefficients
};

FeedbackOperator build_feedback(SubspacePair pair, double lambda);

/// Margins Xi_1(M), Xi_2(lambda) from the closed-loop energy estimate; the
/// stabilization rate mu is certified when both are >= 4 mu. beta_Mplus and
/// alpha_1 enter squared (ratios of V- to L2-norms).
struct SufficiencyMargins {
  double xi_1;
  double xi_2;
};

SufficiencyMargins sufficiency_margins(double gamma1, double gamma2, double lambda,
                                       double beta_Mplus, double c_rc,
                                       double alpha1 = 1.0);

}  // namespace parastab
