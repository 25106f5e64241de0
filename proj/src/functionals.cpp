#include "effilab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace effilab {

namespace {

double moment(const LocationDensity& d, const QuadratureSpec& q, auto&& g) {
  return expectation(d, g, q).value;
}

}  // namespace

EtaSet EtaSet::reference(Family family) {
  switch (family) {
    case Family::GumbelMin: return gumbel();
    case Family::Normal: return normal();
    case Family::Logistic: return logistic();
  }
  return {};
}

double fisher_information(const LocationDensity& d, const QuadratureSpec& q) {
  return moment(d, q, [&](double x) {
    const double s = d.psi(1, x);
    return s * s;
  });
}

EtaSet eta_set(const LocationDensity& d, const QuadratureSpec& q) {
  const double info = fisher_information(d, q);
  const double psi2_sq = moment(d, q, [&](double x) {
    const double p = d.psi(2, x);
    return p * p;
  });
  const double psi1_cube = moment(d, q, [&](double x) { return std::pow(d.psi(1, x), 3); });
  const double psi1_four = moment(d, q, [&](double x) { return std::pow(d.psi(1, x), 4); });
  const double psi1_five = moment(d, q, [&](double x) { return std::pow(d.psi(1, x), 5); });
  const double psi23 = moment(d, q, [&](double x) { return d.psi(2, x) * d.psi(3, x); });

  const double root = std::sqrt(info);
  EtaSet e;
  e.fisher_information = info;
  e.eta2 = psi2_sq / (info * info);
  e.eta3 = psi1_cube / (info * root);
  e.eta4 = psi1_four / (info * info);
  e.eta5 = psi1_five / (info * info * root);
  e.eta6 = psi23 / (info * info * root);
  for (double x : {e.fisher_information, e.eta2, e.eta3, e.eta4, e.eta5, e.eta6}) {
    if (!std::isfinite(x) || !(info > 0.0)) {
      throw NumericalError("eta_set: Fisher information " + std::to_string(info) +
                               " does not give finite eta ratios",
                           info);
    }
  }
  return e;
}

double IdentityResiduals::max_abs() const {
  return std::max({std::abs(psi1_psi2), std::abs(psi1sq_psi2), std::abs(psi1_mean),
                   std::abs(psi2_mean)});
}

IdentityResiduals identity_suite(const LocationDensity& d, const QuadratureSpec& q) {
  // Each identity is integrated as a single difference so that the residual
  // is measured directly rather than as a cancellation of two integrals.
  IdentityResiduals r;
  r.psi1_psi2 = moment(d, q, [&](double x) {
    const double s = d.psi(1, x);
    return s * d.psi(2, x) - 0.5 * s * s * s;
  });
  r.psi1sq_psi2 = moment(d, q, [&](double x) {
    const double s = d.psi(1, x);
    const double s2 = s * s;
    return s2 * d.psi(2, x) - 2.0 * s2 * s2 / 3.0;
  });
  r.psi1_mean = moment(d, q, [&](double x) { return d.psi(1, x); });
  r.psi2_mean = moment(d, q, [&](double x) { return d.psi(2, x); });
  return r;
}

double cs_gap(const EtaSet& e) {
  return e.eta2 - e.eta4 / 3.0 - 1.0 - e.eta3 * e.eta3 / 4.0;
}

double third_order_coeff(const EtaSet& e) {
  return 12.0 - 12.0 * e.eta2 + 3.0 * e.eta3 * e.eta3 + 4.0 * e.eta4;
}

DependenceResidual cs_dependence_residual(const LocationDensity& d, double lambda,
                                          const QuadratureSpec& q) {
  const double info = fisher_information(d, q);
  auto z = [&](double x) { return d.score_derivative(x) + info; };

  DependenceResidual out;
  out.z_second_moment = moment(d, q, [&](double x) {
    const double v = z(x);
    return v * v;
  });
  out.residual = moment(d, q, [&](double x) {
    const double r = d.psi(1, x) - lambda * z(x);
    return r * r;
  });
  if (out.z_second_moment < q.abs_tol) {
    out.outcome = DependenceResidual::Outcome::Degenerate;
    return out;
  }
  const double psi1_cube = moment(d, q, [&](double x) { return std::pow(d.psi(1, x), 3); });
  out.optimal_lambda = -psi1_cube / (2.0 * out.z_second_moment);
  return out;
}

}  // namespace effilab
