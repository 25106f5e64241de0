#include "effilab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <sstream>

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace effilab {

namespace {

// Each double-exponential level doubles the abscissa count; beyond this the
// rule has long since saturated double precision.
constexpr std::size_t kMaxLevels = 20;

std::size_t level_cap(const QuadratureSpec& spec) {
  return std::min(spec.max_refinements, kMaxLevels);
}

QuadratureResult checked(QuadratureResult r, const QuadratureSpec& spec, const char* what) {
  const double allowed = std::max(spec.abs_tol, spec.rel_tol * r.l1);
  if (!std::isfinite(r.value) || r.error > allowed) {
    std::ostringstream os;
    os << what << ": quadrature did not converge (error estimate " << r.error << ", allowed "
       << allowed << ", levels " << r.levels << ")";
    throw NumericalError(os.str(), r.error);
  }
  return r;
}

// Boost signals singular or non-finite integrands with its own exceptions.
template <class F>
QuadratureResult guarded(const char* what, F&& integrate) {
  try {
    return integrate();
  } catch (const NumericalError&) {
    throw;
  } catch (const std::exception& e) {
    throw NumericalError(std::string(what) + ": " + e.what(),
                         std::numeric_limits<double>::infinity());
  }
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
    throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
  }
  if (max_refinements < 1) throw std::invalid_argument("QuadratureSpec: max_refinements must be >= 1");
}

QuadratureResult integrate_line(const std::function<double(double)>& h, const QuadratureSpec& spec) {
  spec.validate();
  return guarded("integrate_line", [&] {
    boost::math::quadrature::sinh_sinh<double> rule(level_cap(spec));
    QuadratureResult r;
    r.value = rule.integrate(h, spec.rel_tol, &r.error, &r.l1, &r.levels);
    return checked(r, spec, "integrate_line");
  });
}

QuadratureResult expectation(const LocationDensity& d, const std::function<double(double)>& g,
                             const QuadratureSpec& spec) {
  spec.validate();
  if (spec.domain == DomainMap::TwoSidedExponential) {
    return integrate_line(
        [&](double x) {
          const double f = d.density(x);
          // Past the point where f underflows the tail is negligible.
          return f == 0.0 ? 0.0 : g(x) * f;
        },
        spec);
  }
  return guarded("expectation", [&] {
    boost::math::quadrature::tanh_sinh<double> rule(level_cap(spec));
    QuadratureResult r;
    // The rule passes the signed distance to the nearer endpoint; positive
  // means we are in the upper half and it equals 1 - u exactly.
    auto integrand = [&](double u, double distance) {
      const double uc = distance > 0.0 ? distance : 1.0 - u;
      return g(d.cdf_inverse(u, uc));
    };
    r.value = rule.integrate(integrand, 0.0, 1.0, spec.rel_tol, &r.error, &r.l1, &r.levels);
    return checked(r, spec, "expectation");
  });
}

}  // namespace effilab
