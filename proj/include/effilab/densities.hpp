#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "effilab/rng.hpp"

namespace effilab {

/// Built-in location families.
///
/// Adding a family means adding an enumerator here and supplying, for the
/// standardized member (alpha = 0, beta = 1), the log-density, the score
/// functions psi_1..psi_3 and psi_1', the distribution function and its
/// complement, a two-sided quantile, and the mean. Everything downstream
/// (quadrature, expansions, simulation) works off those kernels.
enum class Family { GumbelMin, Normal, Logistic };

std::string_view to_string(Family family);
std::optional<Family> parse_family(std::string_view name);

/// A location-scale density f((x - alpha) / beta) / beta with analytic score
/// derivatives psi_k = f^(k) / f.
///
/// GumbelMin is the minimum-type Gumbel law with density
/// exp[(x - alpha)/beta - exp((x - alpha)/beta)] / beta.
class LocationDensity {
 public:
  LocationDensity(Family family, double alpha = 0.0, double beta = 1.0);

  static LocationDensity gumbel_min(double alpha = 0.0, double beta = 1.0) {
    return {Family::GumbelMin, alpha, beta};
  }
  static LocationDensity normal(double alpha = 0.0, double beta = 1.0) {
    return {Family::Normal, alpha, beta};
  }
  static LocationDensity logistic(double alpha = 0.0, double beta = 1.0) {
    return {Family::Logistic, alpha, beta};
  }

  Family family() const { return family_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  double log_density(double x) const;
  double density(double x) const;
  double cdf(double x) const;
  /// 1 - cdf(x), without cancellation in the upper tail.
  double cdf_complement(double x) const;

  /// Quantile function. Throws std::invalid_argument for u outside (0, 1).
  double cdf_inverse(double u) const;
  /// Quantile function given both u and 1 - u; whichever is smaller must be
  /// accurate, which keeps both tails resolved down to the smallest doubles.
  double cdf_inverse(double u, double u_complement) const;

  /// psi_k(x) = f^(k)(x) / f(x) for k in {1, 2, 3}.
  double psi(int k, double x) const;
  /// psi_1'(x) = psi_2(x) - psi_1(x)^2, evaluated in closed form.
  double score_derivative(double x) const;

  /// {psi_1(x), psi_1'(x)} sharing one evaluation of the kernel.
  std::pair<double, double> score_and_derivative(double x) const;

  /// log f(x + shift) - log f(x), arranged to avoid cancellation.
  double log_ratio(double x, double shift) const;

  double mean() const;

  /// Precomputed evaluator of the pair
  ///   {log f(x + shift) - log f(x),  log f(x) - log f(x - shift)}
  /// i.e. the likelihood-ratio increment at x and at x - shift.
  class LogRatioPair {
   public:
    LogRatioPair(const LocationDensity& d, double shift);
    std::pair<double, double> operator()(double x) const;

   private:
    const LocationDensity* d_;
    double s_;
    double up_;    // expm1(s)
    double down_;  // -expm1(-s)
  };

  LogRatioPair log_ratio_pair(double shift) const { return {*this, shift}; }

  /// Fills `out` with i.i.d. inverse-CDF draws.
  void sample(std::span<double> out, Rng& rng) const;
  std::vector<double> sample(std::size_t n, Rng& rng) const;

  friend bool operator==(const LocationDensity&, const LocationDensity&) = default;

  std::string describe() const;

 private:
  double standardize(double x) const { return (x - alpha_) / beta_; }

  Family family_;
  double alpha_;
  double beta_;
};

}  // namespace effilab
