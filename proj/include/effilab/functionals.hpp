#pragma once

#include "effilab/densities.hpp"
#include "effilab/quadrature.hpp"

namespace effilab {

/// Functional fingerprint of a density: Fisher information and the
/// standardized score moments that drive every expansion coefficient.
///
///   eta2 = E psi2^2 / I^2        eta3 = E psi1^3 / I^(3/2)
///   eta4 = E psi1^4 / I^2        eta5 = E psi1^5 / I^(5/2)
///   eta6 = E psi2 psi3 / I^(5/2)
///
/// A plain value: expansions can be driven by hand-entered tables.
struct EtaSet {
  double fisher_information = 1.0;
  double eta2 = 0.0;
  double eta3 = 0.0;
  double eta4 = 0.0;
  double eta5 = 0.0;
  double eta6 = 0.0;

  /// Closed-form values for the standardized built-in families.
  static EtaSet gumbel() { return {1.0, 5.0, -2.0, 9.0, -44.0, -13.0}; }
  static EtaSet normal() { return {1.0, 2.0, 0.0, 3.0, 0.0, 0.0}; }
  static EtaSet logistic() { return {1.0 / 3.0, 9.0 / 5.0, 0.0, 9.0 / 5.0, 0.0, 0.0}; }
  static EtaSet reference(Family family);

  friend bool operator==(const EtaSet&, const EtaSet&) = default;
};

/// I(f) = E psi1^2, the variance of the score.
double fisher_information(const LocationDensity& d, const QuadratureSpec& q = {});

EtaSet eta_set(const LocationDensity& d, const QuadratureSpec& q = {});

/// Signed residuals (left minus right) of the integration-by-parts
/// identities satisfied by any regular location density.
struct IdentityResiduals {
  double psi1_psi2 = 0.0;       ///< E psi1 psi2 - E psi1^3 / 2
  double psi1sq_psi2 = 0.0;     ///< E psi1^2 psi2 - 2 E psi1^4 / 3
  double psi1_mean = 0.0;       ///< E psi1
  double psi2_mean = 0.0;       ///< E psi2

  double max_abs() const;
};

IdentityResiduals identity_suite(const LocationDensity& d, const QuadratureSpec& q = {});

/// eta2 - eta4/3 - 1 - eta3^2/4. Nonnegative by Cauchy-Schwarz applied to
/// Y = psi1 and Z = psi1' - E psi1'; zero exactly in the equality case.
double cs_gap(const EtaSet& e);

/// 12 - 12 eta2 + 3 eta3^2 + 4 eta4; equals -12 * cs_gap. Its vanishing is
/// the condition for optimal n^-1 coefficients of interval lengths.
double third_order_coeff(const EtaSet& e);

/// Squared L2(f) norm of psi1 - lambda * Z with Z = psi2 - psi1^2 + I.
///
/// When E Z^2 falls below abs_tol the dependence is degenerate (Z vanishes,
/// as for the normal law); the outcome is reported rather than thrown, and
/// `optimal_lambda` is left at zero.
struct DependenceResidual {
  enum class Outcome { Resolved, Degenerate };

  Outcome outcome = Outcome::Resolved;
  double residual = 0.0;
  double z_second_moment = 0.0;
  double optimal_lambda = 0.0;  ///< -E psi1^3 / (2 E Z^2)
};

DependenceResidual cs_dependence_residual(const LocationDensity& d, double lambda,
                                          const QuadratureSpec& q = {});

}  // namespace effilab
