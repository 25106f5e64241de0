#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "effilab/densities.hpp"
#include "effilab/quadrature.hpp"

namespace effilab {

/// Log-likelihood-ratio statistics sum_i [log f(X_i + delta) - log f(X_i)]
/// for `reps` replicates of size n, realized from the same draws V_i ~ f:
/// `null` takes X_i = V_i, `shifted` takes X_i = V_i - delta.
struct LlrPair {
  std::vector<double> null;
  std::vector<double> shifted;
};

/// Replicate r draws from Rng(seed, stream_offset + r). Requires delta >= 0
/// and reps >= 10^4.
LlrPair llr_pair_sample(const LocationDensity& d, std::size_t n, double delta, std::size_t reps,
                        std::uint64_t seed, unsigned threads = 1);

struct NpOptions {
  std::uint64_t seed = 20100101;
  unsigned threads = 1;
  /// Absolute floor of the |v_hat - v| stopping rule.
  double tol_v = 1e-5;
  /// Multiple of se_v within which v_hat counts as matching v.
  double noise_stop = 2.0;
  /// Bisection stops once the bracket is narrower than this times (z_v - z_u).
  double relative_width = 1e-3;
  QuadratureSpec quadrature{};
};

struct BisectionStep {
  double epsilon;
  double log_c;
  double u_hat;
  double v_hat;
};

/// Monte Carlo solution (epsilon, log c) of
///   P_0(LLR >= log c) = u,   P_{-epsilon/a_n}(LLR >= log c) = v.
struct NPSolution {
  double epsilon = 0.0;
  double log_c = 0.0;
  double u_hat = 0.0;
  double v_hat = 0.0;
  double se_u = 0.0;
  double se_v = 0.0;
  /// Delta-method standard error of epsilon from the local slope of v_hat.
  double se_epsilon = 0.0;
  std::size_t reps = 0;
  std::size_t n = 0;
  double a_n = 0.0;

  double u_target = 0.0;
  double v_target = 0.0;
  LocationDensity density = LocationDensity::normal();
  /// Set when the initial bracket [0, 4 (z_v - z_u)] had to be doubled.
  bool bracket_widened = false;
  /// v_hat nondecreasing along the trace up to 2 se_v.
  bool monotone = true;
  std::vector<BisectionStep> trace;
};

/// Raised when no epsilon in the (possibly widened) bracket reaches v.
class BracketError : public NumericalError {
 public:
  BracketError(const std::string& what, double v_low, double v_high)
      : NumericalError(what, v_high), v_low_(v_low), v_high_(v_high) {}
  double v_low() const { return v_low_; }
  double v_high() const { return v_high_; }

 private:
  double v_low_;
  double v_high_;
};

/// Solves for epsilon by bisection with common random numbers.
///
/// For each candidate epsilon, log c is the left-continuous empirical
/// (1 - u)-quantile of the null statistics, which fixes the u equation, and
/// v_hat is the fraction of shifted statistics at or above log c. Draws are
/// regenerated from the same streams at every step, so v_hat is a fixed,
/// nearly monotone function of epsilon and the result is deterministic in
/// the seed. Requires 0 < u <= v < 1 and reps >= 10^4; u == v returns 0.
NPSolution solve_epsilon(const LocationDensity& d, std::size_t n, double u, double v,
                         std::size_t reps, const NpOptions& options = {});

}  // namespace effilab
