#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

#include "effilab/densities.hpp"

namespace effilab {

/// Raised when a numerical procedure (quadrature, Newton, bracketing) does
/// not meet its stopping rule. `residual()` carries the last error estimate.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

enum class DomainMap {
  /// Integrate over u = F(x) in (0, 1) with a tanh-sinh rule.
  CdfSubstitution,
  /// Integrate over the real line with a sinh-sinh rule.
  TwoSidedExponential,
};

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  std::size_t max_refinements = 60;
  DomainMap domain = DomainMap::CdfSubstitution;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
};

/// E g(X) for X ~ d, i.e. the integral of g(x) f(x) dx.
/// Throws NumericalError when the error estimate exceeds
/// max(abs_tol, rel_tol * L1).
QuadratureResult expectation(const LocationDensity& d, const std::function<double(double)>& g,
                             const QuadratureSpec& spec = {});

/// Integral of h over the real line using the two-sided exponential map.
QuadratureResult integrate_line(const std::function<double(double)>& h,
                                const QuadratureSpec& spec = {});

}  // namespace effilab
