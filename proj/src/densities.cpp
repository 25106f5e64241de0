#include "effilab/densities.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "effilab/normal.hpp"

namespace effilab {

namespace {

constexpr double kLogSqrt2Pi = 0.918938533204672741780329736405617640;

// Standardized kernels (alpha = 0, beta = 1).

namespace gumbel {

double log_density(double z) { return z - std::exp(z); }
double cdf(double z) { return -std::expm1(-std::exp(z)); }
double cdf_complement(double z) { return std::exp(-std::exp(z)); }
double quantile(double u, double uc) {
  return u <= 0.5 ? std::log(-std::log1p(-u)) : std::log(-std::log(uc));
}
// In terms of w = e^z.
double psi(int k, double z) {
  const double w = std::exp(z);
  switch (k) {
    case 1: return 1.0 - w;
    case 2: return 1.0 + w * (-3.0 + w);
    default: return 1.0 + w * (-7.0 + w * (6.0 - w));
  }
}
double score_derivative(double z) { return -std::exp(z); }
double log_ratio(double z, double s) { return s - std::exp(z) * std::expm1(s); }

}  // namespace gumbel

namespace normal {

double log_density(double z) { return -0.5 * z * z - kLogSqrt2Pi; }
double cdf(double z) { return std_normal_cdf(z); }
double cdf_complement(double z) { return std_normal_cdf(-z); }
double quantile(double u, double uc) {
  return u <= 0.5 ? std_normal_quantile(u) : -std_normal_quantile(uc);
}
double psi(int k, double z) {
  switch (k) {
    case 1: return -z;
    case 2: return z * z - 1.0;
    default: return z * (3.0 - z * z);
  }
}
double score_derivative(double) { return -1.0; }
double log_ratio(double z, double s) { return -s * (z + 0.5 * s); }

}  // namespace normal

namespace logistic {

double log_density(double z) {
  const double a = std::abs(z);
  return -a - 2.0 * std::log1p(std::exp(-a));
}
double cdf(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}
double cdf_complement(double z) { return cdf(-z); }
double quantile(double u, double uc) { return std::log(u) - std::log(uc); }
// With t = tanh(z/2): psi_1 = -t, psi_2 = (3t^2 - 1)/2, psi_3 = 2t - 3t^3.
double psi(int k, double z) {
  const double t = std::tanh(0.5 * z);
  switch (k) {
    case 1: return -t;
    case 2: return 0.5 * (3.0 * t * t - 1.0);
    default: return t * (2.0 - 3.0 * t * t);
  }
}
double score_derivative(double z) {
  const double t = std::tanh(0.5 * z);
  return -0.5 * (1.0 - t) * (1.0 + t);
}
double log_ratio(double z, double s) { return log_density(z + s) - log_density(z); }

}  // namespace logistic

void require_probability(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::invalid_argument("cdf_inverse: probability must lie in (0, 1)");
  }
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::GumbelMin: return "gumbel";
    case Family::Normal: return "normal";
    case Family::Logistic: return "logistic";
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "gumbel" || lower == "gumbel-min" || lower == "gumbelmin") return Family::GumbelMin;
  if (lower == "normal" || lower == "gaussian") return Family::Normal;
  if (lower == "logistic") return Family::Logistic;
  return std::nullopt;
}

LocationDensity::LocationDensity(Family family, double alpha, double beta)
    : family_(family), alpha_(alpha), beta_(beta) {
  if (!std::isfinite(alpha)) throw std::invalid_argument("LocationDensity: alpha must be finite");
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("LocationDensity: beta must be positive and finite");
  }
}

double LocationDensity::log_density(double x) const {
  const double z = standardize(x);
  const double base = [&] {
    switch (family_) {
      case Family::GumbelMin: return gumbel::log_density(z);
      case Family::Normal: return normal::log_density(z);
      case Family::Logistic: return logistic::log_density(z);
    }
    return 0.0;
  }();
  return base - std::log(beta_);
}

double LocationDensity::density(double x) const { return std::exp(log_density(x)); }

double LocationDensity::cdf(double x) const {
  const double z = standardize(x);
  switch (family_) {
    case Family::GumbelMin: return gumbel::cdf(z);
    case Family::Normal: return normal::cdf(z);
    case Family::Logistic: return logistic::cdf(z);
  }
  return 0.0;
}

double LocationDensity::cdf_complement(double x) const {
  const double z = standardize(x);
  switch (family_) {
    case Family::GumbelMin: return gumbel::cdf_complement(z);
    case Family::Normal: return normal::cdf_complement(z);
    case Family::Logistic: return logistic::cdf_complement(z);
  }
  return 0.0;
}

double LocationDensity::cdf_inverse(double u) const {
  require_probability(u);
  return cdf_inverse(u, 1.0 - u);
}

double LocationDensity::cdf_inverse(double u, double u_complement) const {
  const double z = [&] {
    switch (family_) {
      case Family::GumbelMin: return gumbel::quantile(u, u_complement);
      case Family::Normal: return normal::quantile(u, u_complement);
      case Family::Logistic: return logistic::quantile(u, u_complement);
    }
    return 0.0;
  }();
  return alpha_ + beta_ * z;
}

double LocationDensity::psi(int k, double x) const {
  if (k < 1 || k > 3) throw std::invalid_argument("psi: order must be 1, 2 or 3");
  const double z = standardize(x);
  const double base = [&] {
    switch (family_) {
      case Family::GumbelMin: return gumbel::psi(k, z);
      case Family::Normal: return normal::psi(k, z);
      case Family::Logistic: return logistic::psi(k, z);
    }
    return 0.0;
  }();
  double scale = 1.0;
  for (int i = 0; i < k; ++i) scale *= beta_;
  return base / scale;
}

double LocationDensity::score_derivative(double x) const {
  const double z = standardize(x);
  const double base = [&] {
    switch (family_) {
      case Family::GumbelMin: return gumbel::score_derivative(z);
      case Family::Normal: return normal::score_derivative(z);
      case Family::Logistic: return logistic::score_derivative(z);
    }
    return 0.0;
  }();
  return base / (beta_ * beta_);
}

std::pair<double, double> LocationDensity::score_and_derivative(double x) const {
  const double z = standardize(x);
  double s = 0.0;
  double ds = 0.0;
  switch (family_) {
    case Family::GumbelMin: {
      const double w = std::exp(z);
      s = 1.0 - w;
      ds = -w;
      break;
    }
    case Family::Normal:
      s = -z;
      ds = -1.0;
      break;
    case Family::Logistic: {
      const double t = std::tanh(0.5 * z);
      s = -t;
      ds = -0.5 * (1.0 - t) * (1.0 + t);
      break;
    }
  }
  return {s / beta_, ds / (beta_ * beta_)};
}

double LocationDensity::log_ratio(double x, double shift) const {
  const double z = standardize(x);
  const double s = shift / beta_;
  switch (family_) {
    case Family::GumbelMin: return gumbel::log_ratio(z, s);
    case Family::Normal: return normal::log_ratio(z, s);
    case Family::Logistic: return logistic::log_ratio(z, s);
  }
  return 0.0;
}

LocationDensity::LogRatioPair::LogRatioPair(const LocationDensity& d, double shift)
    : d_(&d), s_(shift / d.beta()), up_(std::expm1(s_)), down_(-std::expm1(-s_)) {}

std::pair<double, double> LocationDensity::LogRatioPair::operator()(double x) const {
  const double z = d_->standardize(x);
  switch (d_->family_) {
    case Family::GumbelMin: {
      const double w = std::exp(z);
      return {s_ - w * up_, s_ - w * down_};
    }
    case Family::Normal:
      return {-s_ * (z + 0.5 * s_), -s_ * (z - 0.5 * s_)};
    case Family::Logistic: {
      const double here = logistic::log_density(z);
      return {logistic::log_density(z + s_) - here, here - logistic::log_density(z - s_)};
    }
  }
  return {0.0, 0.0};
}

double LocationDensity::mean() const {
  switch (family_) {
    case Family::GumbelMin: return alpha_ - std::numbers::egamma * beta_;
    case Family::Normal:
    case Family::Logistic: return alpha_;
  }
  return alpha_;
}

void LocationDensity::sample(std::span<double> out, Rng& rng) const {
  for (double& x : out) {
    const double u = rng.uniform_open();
    x = cdf_inverse(u, 1.0 - u);
  }
}

std::vector<double> LocationDensity::sample(std::size_t n, Rng& rng) const {
  std::vector<double> out(n);
  sample(out, rng);
  return out;
}

std::string LocationDensity::describe() const {
  std::ostringstream os;
  os << to_string(family_) << "(alpha=" << alpha_ << ", beta=" << beta_ << ")";
  return os.str();
}

}  // namespace effilab
