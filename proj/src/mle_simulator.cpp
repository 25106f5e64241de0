#include "effilab/mle_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "effilab/functionals.hpp"
#include "effilab/order_statistics.hpp"
#include "effilab/parallel.hpp"

namespace effilab {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kFailureBudget = 1e-6;

struct Score {
  double value;
  double slope;  // d/dtheta of the score
};

Score score_at(const LocationDensity& d, std::span<const double> xs, double theta) {
  Score s{0.0, 0.0};
  for (double x : xs) {
    const auto [psi1, dpsi1] = d.score_and_derivative(x - theta);
    s.value += psi1;
    s.slope -= dpsi1;
  }
  return s;
}

}  // namespace

std::optional<double> try_mle_fit(const LocationDensity& d, std::span<const double> sample) {
  if (sample.size() < 2) throw std::invalid_argument("mle_fit: sample needs at least 2 points");
  const auto [min_it, max_it] = std::minmax_element(sample.begin(), sample.end());
  double lo = *min_it - 10.0 * d.beta();
  double hi = *max_it + 10.0 * d.beta();
  const double n = static_cast<double>(sample.size());

  const double score_lo = score_at(d, sample, lo).value;
  const double score_hi = score_at(d, sample, hi).value;
  if (!(score_lo < 0.0 && score_hi > 0.0)) return std::nullopt;

  const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / n;
  double theta = std::clamp(mean - d.mean(), lo, hi);
  for (int it = 0; it < kMaxIterations; ++it) {
    const Score s = score_at(d, sample, theta);
    if (std::abs(s.value) <= 1e-12 * n) return theta;
    if (s.value < 0.0) {
      lo = theta;
    } else {
      hi = theta;
    }
    double next = theta - s.value / s.slope;
    if (!(s.slope > 0.0) || !(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = next - theta;
    theta = next;
    if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(theta))) return theta;
  }
  return std::nullopt;
}

double mle_fit(const LocationDensity& d, std::span<const double> sample) {
  if (auto theta = try_mle_fit(d, sample)) return *theta;
  throw FitFailure("mle_fit: no sign-bracketed root found for the score equation",
                   std::numeric_limits<double>::quiet_NaN());
}

SimConfig SimConfig::make(const LocationDensity& d, std::size_t n, std::size_t reps,
                          std::uint64_t seed, double theta, const QuadratureSpec& q) {
  SimConfig cfg;
  cfg.density = d;
  cfg.theta = theta;
  cfg.n = n;
  cfg.reps = reps;
  cfg.seed = seed;
  cfg.a_n = std::sqrt(static_cast<double>(n) * fisher_information(d, q));
  return cfg;
}

void SimConfig::validate(const QuadratureSpec& q) const {
  if (n < 2) throw std::invalid_argument("SimConfig: n must be at least 2");
  if (reps < 1000) throw std::invalid_argument("SimConfig: reps must be at least 10^3");
  if (!std::isfinite(theta)) throw std::invalid_argument("SimConfig: theta must be finite");
  if (!(a_n > 0.0)) throw std::invalid_argument("SimConfig: a_n must be positive");
  const double expected = std::sqrt(static_cast<double>(n) * fisher_information(density, q));
  if (std::abs(a_n - expected) > 1e-9 * expected) {
    std::ostringstream os;
    os << "SimConfig: a_n = " << a_n << " inconsistent with sqrt(n I) = " << expected;
    throw std::invalid_argument(os.str());
  }
}

SimResult simulate(const SimConfig& cfg) {
  cfg.validate();
  std::vector<double> values(cfg.reps);
  parallel_chunks(cfg.reps, resolve_threads(cfg.threads), [&](std::size_t begin, std::size_t end) {
    std::vector<double> buffer(cfg.n);
    for (std::size_t r = begin; r < end; ++r) {
      Rng rng(cfg.seed, r);
      cfg.density.sample(buffer, rng);
      for (double& x : buffer) x += cfg.theta;
      const auto fit = try_mle_fit(cfg.density, buffer);
      values[r] = fit ? cfg.a_n * (*fit - cfg.theta) : std::numeric_limits<double>::quiet_NaN();
    }
  });

  SimResult result;
  result.config = cfg;
  const auto kept = std::remove_if(values.begin(), values.end(), [](double x) { return std::isnan(x); });
  result.newton_failures = static_cast<std::size_t>(values.end() - kept);
  values.erase(kept, values.end());
  if (static_cast<double>(result.newton_failures) > kFailureBudget * static_cast<double>(cfg.reps)) {
    std::ostringstream os;
    os << "simulate: " << result.newton_failures << " of " << cfg.reps
       << " MLE fits failed for " << cfg.density.describe() << ", n = " << cfg.n;
    throw NumericalError(os.str(), static_cast<double>(result.newton_failures));
  }
  std::sort(values.begin(), values.end());
  result.standardized = std::move(values);
  return result;
}

double empirical_quantile(std::span<const double> sorted, double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("empirical_quantile: u must lie in (0, 1)");
  if (sorted.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
  return sorted[quantile_rank(sorted.size(), u) - 1];
}

double empirical_quantile(const SimResult& r, double u) {
  return empirical_quantile(r.standardized, u);
}

namespace {

double density_at_quantile(std::span<const double> sorted, double u) {
  const double count = static_cast<double>(sorted.size());
  const double h = std::min({0.5 * std::cbrt(1.0 / count), 0.5 * u, 0.5 * (1.0 - u)});
  const double spread = empirical_quantile(sorted, u + h) - empirical_quantile(sorted, u - h);
  return spread > 0.0 ? 2.0 * h / spread : std::numeric_limits<double>::infinity();
}

}  // namespace

double quantile_standard_error(std::span<const double> sorted, double u) {
  const double g = density_at_quantile(sorted, u);
  return std::sqrt(u * (1.0 - u) / static_cast<double>(sorted.size())) / g;
}

IntervalCheck interval_check(const SimResult& r, const NPSolution& np, double u, double v) {
  if (!(r.config.density == np.density) || r.config.n != np.n) {
    throw std::invalid_argument("interval_check: simulation and NP solution use different models");
  }
  if (u != np.u_target || v != np.v_target) {
    throw std::invalid_argument("interval_check: (u, v) differ from the NP solution targets");
  }
  if (!(u > 0.0 && u <= v && v < 1.0)) throw std::invalid_argument("interval_check: need 0 < u <= v < 1");

  IntervalCheck c;
  c.quantile_u = empirical_quantile(r, u);
  c.quantile_v = empirical_quantile(r, v);
  c.length = c.quantile_v - c.quantile_u;
  c.epsilon = np.epsilon;
  c.difference = c.length - c.epsilon;
  if (u == v) {
    c.standard_error = 0.0;
    c.holds = c.difference >= 0.0;
    return c;
  }
  const double count = static_cast<double>(r.standardized.size());
  const double gu = density_at_quantile(r.standardized, u);
  const double gv = density_at_quantile(r.standardized, v);
  // Joint asymptotic covariance of two sample quantiles.
  const double var_length =
      (u * (1.0 - u) / (gu * gu) + v * (1.0 - v) / (gv * gv) - 2.0 * u * (1.0 - v) / (gu * gv)) /
      count;
  c.standard_error = std::sqrt(std::max(0.0, var_length) + np.se_epsilon * np.se_epsilon);
  c.holds = c.difference >= -3.0 * c.standard_error;
  return c;
}

}  // namespace effilab
