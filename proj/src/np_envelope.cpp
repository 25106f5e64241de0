#include "effilab/np_envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "effilab/functionals.hpp"
#include "effilab/normal.hpp"
#include "effilab/order_statistics.hpp"
#include "effilab/parallel.hpp"

namespace effilab {

namespace {

// Keeps these streams disjoint from the MLE simulator's.
constexpr std::uint64_t kStreamOffset = std::uint64_t{1} << 62;
constexpr std::size_t kMinReps = 10'000;

void fill_llr(const LocationDensity& d, std::size_t n, double delta, std::uint64_t seed,
              unsigned threads, std::vector<double>& null, std::vector<double>& shifted) {
  const auto ratio = d.log_ratio_pair(delta);
  parallel_chunks(null.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      Rng rng(seed, kStreamOffset + r);
      double a = 0.0;
      double b = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform_open();
        const auto [at_x, at_shifted] = ratio(d.cdf_inverse(u, 1.0 - u));
        a += at_x;
        b += at_shifted;
      }
      null[r] = a;
      shifted[r] = b;
    }
  });
}

class Evaluator {
 public:
  Evaluator(const LocationDensity& d, std::size_t n, double u, std::size_t reps, double a_n,
            const NpOptions& options)
      : d_(d), n_(n), u_(u), a_n_(a_n), options_(options), null_(reps), shifted_(reps) {}

  BisectionStep operator()(double epsilon) {
    fill_llr(d_, n_, epsilon / a_n_, options_.seed, resolve_threads(options_.threads), null_,
             shifted_);
    const std::size_t reps = null_.size();
    const std::size_t k = quantile_rank(reps, 1.0 - u_);
    std::nth_element(null_.begin(), null_.begin() + static_cast<std::ptrdiff_t>(k - 1), null_.end());
    const double log_c = null_[k - 1];
    const auto at_or_above = [log_c](const std::vector<double>& xs) {
      return static_cast<double>(std::count_if(xs.begin(), xs.end(),
                                               [log_c](double x) { return x >= log_c; }));
    };
    const double count = static_cast<double>(reps);
    return {epsilon, log_c, at_or_above(null_) / count, at_or_above(shifted_) / count};
  }

 private:
  const LocationDensity& d_;
  std::size_t n_;
  double u_;
  double a_n_;
  const NpOptions& options_;
  std::vector<double> null_;
  std::vector<double> shifted_;
};

}  // namespace

LlrPair llr_pair_sample(const LocationDensity& d, std::size_t n, double delta, std::size_t reps,
                        std::uint64_t seed, unsigned threads) {
  if (n < 1) throw std::invalid_argument("llr_pair_sample: n must be at least 1");
  if (!(delta >= 0.0)) throw std::invalid_argument("llr_pair_sample: delta must be >= 0");
  if (reps < kMinReps) throw std::invalid_argument("llr_pair_sample: reps must be >= 10^4");
  LlrPair out{std::vector<double>(reps), std::vector<double>(reps)};
  fill_llr(d, n, delta, seed, resolve_threads(threads), out.null, out.shifted);
  return out;
}

NPSolution solve_epsilon(const LocationDensity& d, std::size_t n, double u, double v,
                         std::size_t reps, const NpOptions& options) {
  if (n < 1) throw std::invalid_argument("solve_epsilon: n must be at least 1");
  if (!(u > 0.0 && u <= v && v < 1.0)) {
    throw std::invalid_argument("solve_epsilon: requires 0 < u <= v < 1");
  }
  if (reps < kMinReps) throw std::invalid_argument("solve_epsilon: reps must be >= 10^4");

  NPSolution sol;
  sol.reps = reps;
  sol.n = n;
  sol.u_target = u;
  sol.v_target = v;
  sol.density = d;
  sol.a_n = std::sqrt(static_cast<double>(n) * fisher_information(d, options.quadrature));
  const double count = static_cast<double>(reps);
  sol.se_u = std::sqrt(u * (1.0 - u) / count);
  sol.se_v = std::sqrt(v * (1.0 - v) / count);

  if (u == v) {
    sol.u_hat = u;
    sol.v_hat = v;
    return sol;
  }

  const double first_order = std_normal_quantile(v) - std_normal_quantile(u);
  const double noise = std::max(options.tol_v, options.noise_stop * sol.se_v);
  Evaluator evaluate(d, n, u, reps, sol.a_n, options);

  // At epsilon -> 0 both laws coincide, so v_hat tends to u < v: the lower
  // end of the bracket needs no evaluation.
  double lo = 0.0;
  double hi = 4.0 * first_order;
  BisectionStep hi_step = evaluate(hi);
  sol.trace.push_back(hi_step);
  if (hi_step.v_hat < v) {
    sol.bracket_widened = true;
    lo = hi;
    hi *= 2.0;
    hi_step = evaluate(hi);
    sol.trace.push_back(hi_step);
    if (hi_step.v_hat < v) {
      std::ostringstream os;
      os << "solve_epsilon: v = " << v << " not reached for epsilon in [0, " << hi
         << "]; achieved v range [" << u << ", " << hi_step.v_hat << "]";
      throw BracketError(os.str(), u, hi_step.v_hat);
    }
  }

  BisectionStep best = hi_step;
  while (hi - lo >= options.relative_width * first_order) {
    const double mid = 0.5 * (lo + hi);
    const BisectionStep step = evaluate(mid);
    sol.trace.push_back(step);
    best = step;
    if (std::abs(step.v_hat - v) <= noise) break;
    if (step.v_hat < v) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // On a width stop, report the bracket midpoint.
  if (std::abs(best.v_hat - v) > noise) {
    best = evaluate(0.5 * (lo + hi));
    sol.trace.push_back(best);
  }

  sol.epsilon = best.epsilon;
  sol.log_c = best.log_c;
  sol.u_hat = best.u_hat;
  sol.v_hat = best.v_hat;

  // Local slope of v_hat for the delta-method error.
  const double w = 0.05 * first_order;
  const BisectionStep below = evaluate(std::max(0.0, sol.epsilon - w));
  const BisectionStep above = evaluate(sol.epsilon + w);
  const double slope = (above.v_hat - below.v_hat) / (above.epsilon - below.epsilon);
  sol.se_epsilon = slope > 0.0 ? std::hypot(sol.se_u, sol.se_v) / slope
                               : std::numeric_limits<double>::infinity();

  std::vector<BisectionStep> ordered = sol.trace;
  ordered.push_back(below);
  ordered.push_back(above);
  std::sort(ordered.begin(), ordered.end(),
            [](const BisectionStep& a, const BisectionStep& b) { return a.epsilon < b.epsilon; });
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    if (ordered[i].v_hat < ordered[i - 1].v_hat - 2.0 * sol.se_v) sol.monotone = false;
  }
  return sol;
}

}  // namespace effilab
