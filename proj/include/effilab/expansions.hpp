#pragma once

#include <cstddef>

#include "effilab/functionals.hpp"
#include "effilab/normal.hpp"

namespace effilab {

/// Truncated Cornish-Fisher expansion of the quantile function of the
/// standardized MLE sqrt(n I) (T_n - theta), through order n^-3/2.
/// Evaluated as written: no resummation, no monotonicity repair.
double cf_quantile(const EtaSet& e, std::size_t n, double v);

/// Derivative of cf_quantile with respect to z_v, evaluated at z_v = Phi^-1(v).
/// A nonpositive value marks a region where the truncated expansion is not
/// a valid quantile function.
double cf_quantile_slope(const EtaSet& e, std::size_t n, double v);

/// Truncated expansion, through order n^-3/2, of the Neyman-Pearson length
/// bound epsilon solving the likelihood-ratio system for (u, v).
/// u == v is allowed and yields 0.
double epsilon_tilde(const EtaSet& e, std::size_t n, double u, double v);

/// Order-by-order decomposition of cf_quantile(v) - cf_quantile(u) - epsilon_tilde.
struct DeficiencyReport {
  double total = 0.0;               ///< sum of the three orders
  double order_half = 0.0;          ///< n^-1/2 part, identically zero
  double order_one = 0.0;           ///< n^-1 part
  double order_three_halves = 0.0;  ///< n^-3/2 part
  /// False when the truncated Cornish-Fisher expansion is not increasing at
  /// z_u or z_v; the numbers are still reported as computed.
  bool monotone = true;

  EtaSet etas;
  std::size_t n = 0;
  double u = 0.0;
  double v = 0.0;
  double z_u = 0.0;
  double z_v = 0.0;
};

/// Requires n >= 1 and 0 < u < v < 1.
DeficiencyReport deficiency(const EtaSet& e, std::size_t n, double u, double v);

/// Closed form of the n^-1 deficiency term:
///   -(12 - 12 eta2 + 3 eta3^2 + 4 eta4) (z_v^3 - z_u^3 + z_u z_v^2 - z_u^2 z_v) / (96 n).
double third_order_term(const EtaSet& e, std::size_t n, double u, double v);

}  // namespace effilab
