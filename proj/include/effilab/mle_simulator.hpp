#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "effilab/densities.hpp"
#include "effilab/np_envelope.hpp"
#include "effilab/quadrature.hpp"

namespace effilab {

/// Thrown by mle_fit when the score has no sign change on the search
/// interval or Newton/bisection exceeds its iteration cap.
class FitFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Location MLE: root of sum_i psi1(x_i - theta) = 0.
///
/// Newton steps use the analytic derivative; any step leaving the current
/// sign bracket (initially [min x - 10 beta, max x + 10 beta]) is replaced by
/// bisection. Stops when |score| <= 1e-12 n or the step falls below 1e-14.
double mle_fit(const LocationDensity& d, std::span<const double> sample);
/// As mle_fit, returning nullopt instead of throwing FitFailure.
std::optional<double> try_mle_fit(const LocationDensity& d, std::span<const double> sample);

struct SimConfig {
  LocationDensity density = LocationDensity::normal();
  double theta = 0.0;
  std::size_t n = 2;
  std::size_t reps = 1000;
  std::uint64_t seed = 20100101;
  /// sqrt(n I(f)), with I from quadrature.
  double a_n = 1.0;
  unsigned threads = 1;

  /// Fills a_n from the density's Fisher information.
  static SimConfig make(const LocationDensity& d, std::size_t n, std::size_t reps,
                        std::uint64_t seed, double theta = 0.0, const QuadratureSpec& q = {});

  /// n >= 2, reps >= 10^3, a_n consistent with quadrature to 1e-9.
  void validate(const QuadratureSpec& q = {}) const;
};

/// Sorted standardized replicates a_n (T_n - theta).
struct SimResult {
  std::vector<double> standardized;
  std::size_t newton_failures = 0;
  SimConfig config;
};

/// Replicate r draws from Rng(seed, r) regardless of the worker count.
/// Failed fits are dropped and counted; more than 1e-6 reps of them aborts
/// with a NumericalError.
SimResult simulate(const SimConfig& cfg);

/// Left-continuous empirical quantile: the ceil(reps u)-th order statistic.
double empirical_quantile(const SimResult& r, double u);
double empirical_quantile(std::span<const double> sorted, double u);

/// Asymptotic standard error of an empirical quantile, with the density at
/// the quantile estimated from order-statistic spacings.
double quantile_standard_error(std::span<const double> sorted, double u);

struct IntervalCheck {
  double quantile_u = 0.0;
  double quantile_v = 0.0;
  double length = 0.0;       ///< quantile_v - quantile_u
  double epsilon = 0.0;
  double difference = 0.0;   ///< length - epsilon
  double standard_error = 0.0;
  bool holds = true;         ///< difference >= -3 standard_error
};

/// Compares the simulated interval length with the Neyman-Pearson bound.
/// Rejects results whose (density, n, u, v) do not match the solution.
IntervalCheck interval_check(const SimResult& r, const NPSolution& np, double u, double v);

}  // namespace effilab
