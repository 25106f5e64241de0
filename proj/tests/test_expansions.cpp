#include <gtest/gtest.h>

#include <boost/rational.hpp>
#include <cmath>
#include <random>

#include "effilab/expansion_coefficients.hpp"
#include "effilab/expansions.hpp"
#include "effilab/normal.hpp"
#include "oracles.hpp"

using namespace effilab;

namespace {

using Q = oracle::Q;

// Term-by-term evaluation with the fractional coefficients, in long double.
long double cf_direct(const EtaSet& e, double n, double v) {
  const long double z = oracle::normal_quantile_bisection(v);
  const long double e2 = e.eta2, e3 = e.eta3, e4 = e.eta4, e5 = e.eta5, e6 = e.eta6;
  const long double c3 = 6 * e2 * e3 - 3 * e3 - 19.0L / 12 * e3 * e3 * e3 - e3 * e4 +
                         24.0L / 5 * e5 - 18 * e6;
  const long double c1 = 12 * e2 * e3 - 15 * e3 - 67.0L / 9 * e3 * e3 * e3 + 3 * e3 * e4 -
                         9.0L / 5 * e5;
  const long double rn = std::sqrt(static_cast<long double>(n));
  return z * (1 + e3 * z / (12 * rn) +
              ((-9 + 12 * e2 - e3 * e3 - 5 * e4) * z * z - 9 - 2 * e3 * e3 + 3 * e4) / (72 * n) +
              (c3 * z * z * z + c1 * z) / (144 * n * rn));
}

long double eps_direct(const EtaSet& e, double n, double u, double v) {
  const long double a = oracle::normal_quantile_bisection(u);
  const long double b = oracle::normal_quantile_bisection(v);
  const long double e2 = e.eta2, e3 = e.eta3, e4 = e.eta4, e5 = e.eta5, e6 = e.eta6;
  const long double rn = std::sqrt(static_cast<long double>(n));
  const long double one =
      (12 * e2 + 5 * e3 * e3 - 8 * e4) * (b * b * b - a * a * a) +
      (36 - 36 * e2 + 9 * e3 * e3 + 12 * e4) * (b * b * a - a * a * b) +
      (-36 - 8 * e3 * e3 + 12 * e4) * (b - a);
  const long double three_halves =
      (270 * e2 * e3 + 60 * e3 * e3 * e3 - 180 * e3 * e4 + 162 * e5 - 540 * e6) *
          (b * b * b * b - a * a * a * a) +
      (-540 * e2 * e3 + 540 * e3 + 270 * e3 * e3 * e3 - 270 * e5 + 1080 * e6) *
          (b * b * b * a - a * a * a * b) +
      (-270 * e3 - 400 * e3 * e3 * e3 + 630 * e3 * e4 - 162 * e5) * (b * b - a * a);
  return (b - a) + e3 * (b * b - a * a) / (12 * rn) + one / (288 * n) +
         three_halves / (12960 * n * rn);
}

EtaSet random_etas(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> eta(-50.0, 50.0);
  return {1.0, eta(rng), eta(rng), eta(rng), eta(rng), eta(rng)};
}

const EtaSet kZero{1.0, 0.0, 0.0, 0.0, 0.0, 0.0};

}  // namespace

TEST(CfQuantile, MedianIsZero) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(cf_quantile(random_etas(rng), 1 + i, 0.5), 0.0);
}

TEST(CfQuantile, ZeroEtas) {
  for (std::size_t n : {1u, 7u, 100u}) {
    for (double v : {0.01, 0.3, 0.975}) {
      const double z = std_normal_quantile(v);
      EXPECT_NEAR(cf_quantile(kZero, n, v), z * (1.0 - (z * z + 1.0) / (8.0 * n)), 1e-14);
    }
  }
}

TEST(CfQuantile, GumbelExample) {
  EXPECT_NEAR(cf_quantile(EtaSet::gumbel(), 100, 0.975), 1.90056, 1e-5);
  EXPECT_NEAR(cf_quantile(EtaSet::gumbel(), 100, 0.975),
              static_cast<double>(cf_direct(EtaSet::gumbel(), 100, 0.975)), 1e-13);
}

TEST(CfQuantile, MatchesTermByTermOnFuzz) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> p(0.01, 0.99);
  for (int i = 0; i < 2000; ++i) {
    const EtaSet e = random_etas(rng);
    const double v = p(rng);
    const std::size_t n = 1 + rng() % 1000;
    const long double want = cf_direct(e, n, v);
    EXPECT_NEAR(cf_quantile(e, n, v), static_cast<double>(want),
                1e-11 * std::max(1.0L, std::abs(want)));
  }
}

TEST(CfQuantile, LargeNLimit) {
  for (double v : {0.025, 0.3, 0.975})
    EXPECT_LE(std::abs(cf_quantile(EtaSet::gumbel(), 1000000000000ull, v) - std_normal_quantile(v)),
              1e-5);
}

TEST(CfQuantile, SymmetricEtasGiveAntisymmetry) {
  for (const EtaSet& e : {EtaSet::normal(), EtaSet::logistic(), EtaSet{1.0, 7.0, 0.0, -3.0, 0.0, 0.0}})
    for (double p : {0.01, 0.1, 0.3, 0.45}) {
      // Snap so that 1 - v is the exact mirror of v.
      const double v = 1.0 - (1.0 - p);
      for (std::size_t n : {1u, 10u, 1000u})
        EXPECT_EQ(cf_quantile(e, n, 1.0 - v), -cf_quantile(e, n, v));
    }
}

TEST(CfQuantile, SlopeMatchesFiniteDifferenceInZ) {
  // d/dz of the polynomial; check against a central difference in z.
  const EtaSet e = EtaSet::gumbel();
  const std::size_t n = 20;
  for (double v : {0.05, 0.5, 0.9}) {
    const double z = std_normal_quantile(v);
    const double h = 1e-5;
    const double up = cf_quantile(e, n, std_normal_cdf(z + h));
    const double dn = cf_quantile(e, n, std_normal_cdf(z - h));
    EXPECT_NEAR(cf_quantile_slope(e, n, v), (up - dn) / (2 * h), 1e-6);
  }
}

TEST(CfQuantile, RejectsBadInput) {
  EXPECT_THROW(cf_quantile(kZero, 0, 0.5), std::invalid_argument);
  EXPECT_THROW(cf_quantile(kZero, 10, 0.0), std::invalid_argument);
  EXPECT_THROW(cf_quantile(kZero, 10, 1.0), std::invalid_argument);
}

TEST(EpsilonTilde, Examples) {
  EXPECT_EQ(epsilon_tilde(EtaSet::gumbel(), 10, 0.3, 0.3), 0.0);
  // Zero etas leave the constant 36 terms of the n^-1 block; the normal
  // table (eta2 = 2, eta4 = 3) is the one that removes every correction.
  const double a = std_normal_quantile(0.1), b = std_normal_quantile(0.8);
  EXPECT_NEAR(epsilon_tilde(kZero, 10, 0.1, 0.8),
              (b - a) + 36.0 * ((b * b * a - a * a * b) - (b - a)) / 2880.0, 1e-15);
  EXPECT_NEAR(epsilon_tilde(EtaSet::gumbel(), 100, 0.025, 0.975), 3.92956, 1e-4);
  EXPECT_NEAR(epsilon_tilde(EtaSet::gumbel(), 100, 0.025, 0.975),
              cf_quantile(EtaSet::gumbel(), 100, 0.975) - cf_quantile(EtaSet::gumbel(), 100, 0.025),
              1e-13);
}

TEST(EpsilonTilde, NormalIsExactDifference) {
  for (std::size_t n : {1u, 50u, 10000u}) {
    const double want = std_normal_quantile(0.8) - std_normal_quantile(0.1);
    EXPECT_NEAR(epsilon_tilde(EtaSet::normal(), n, 0.1, 0.8), want, 1e-14);
  }
}

TEST(EpsilonTilde, MatchesTermByTermOnFuzz) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> p(0.01, 0.99);
  for (int i = 0; i < 2000; ++i) {
    const EtaSet e = random_etas(rng);
    double u = p(rng), v = p(rng);
    if (u > v) std::swap(u, v);
    const std::size_t n = 1 + rng() % 1000;
    const long double want = eps_direct(e, n, u, v);
    EXPECT_NEAR(epsilon_tilde(e, n, u, v), static_cast<double>(want),
                1e-11 * std::max(1.0L, std::abs(want)));
  }
}

TEST(EpsilonTilde, RejectsReversedInterval) {
  EXPECT_THROW(epsilon_tilde(kZero, 10, 0.8, 0.1), std::invalid_argument);
  EXPECT_THROW(epsilon_tilde(kZero, 0, 0.1, 0.8), std::invalid_argument);
}

TEST(Coefficients, GumbelPairingsAreExact) {
  using namespace coeff;
  const Etas<Q> g{Q(5), Q(-2), Q(9), Q(-44), Q(-13)};
  const auto cf = cornish_fisher(g);
  const auto ep = epsilon(g);
  EXPECT_EQ(cf.c3_num / Q(kCfC3Den), Q(-8, 15));
  EXPECT_EQ(cf.c1_num / Q(kCfC1Den), Q(-236, 45));
  EXPECT_EQ(ep.d4, Q(-48));
  EXPECT_EQ(ep.d2, Q(-472));
  EXPECT_EQ(cf.c3_num / Q(kCfC3Den * kCfThreeHalvesDen), Q(-1, 270));
  EXPECT_EQ(ep.d4 / Q(kEpsThreeHalvesDen), Q(-1, 270));
  EXPECT_EQ(ep.d31, Q(0));
  EXPECT_EQ(cf.c1_num / Q(kCfC1Den * kCfThreeHalvesDen), Q(-59, 1620));
  EXPECT_EQ(ep.d2 / Q(kEpsThreeHalvesDen), Q(-59, 1620));

  const auto k = deficiency(g);
  for (const Q& c : {k.k_half, k.k3, k.k21, k.k1, k.k4, k.k31, k.k2}) EXPECT_EQ(c, Q(0));
}

TEST(Coefficients, CombinedIntegersMatchFractionalForms) {
  using namespace coeff;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const Etas<Q> e{Q(int(rng() % 41) - 20), Q(int(rng() % 41) - 20), Q(int(rng() % 41) - 20),
                    Q(int(rng() % 41) - 20), Q(int(rng() % 41) - 20)};
    const auto cf = cornish_fisher(e);
    const Q c3 = Q(6) * e.eta2 * e.eta3 - Q(3) * e.eta3 - Q(19, 12) * e.eta3 * e.eta3 * e.eta3 -
                 e.eta3 * e.eta4 + Q(24, 5) * e.eta5 - Q(18) * e.eta6;
    const Q c1 = Q(12) * e.eta2 * e.eta3 - Q(15) * e.eta3 - Q(67, 9) * e.eta3 * e.eta3 * e.eta3 +
                 Q(3) * e.eta3 * e.eta4 - Q(9, 5) * e.eta5;
    EXPECT_EQ(cf.c3_num / Q(kCfC3Den), c3);
    EXPECT_EQ(cf.c1_num / Q(kCfC1Den), c1);
  }
}

TEST(Deficiency, GumbelCancelsOnGrid) {
  for (double u : {0.05, 0.1, 0.3})
    for (double v : {0.6, 0.8, 0.975})
      for (std::size_t n : {10u, 100u, 1000u}) {
        const auto r = deficiency(EtaSet::gumbel(), n, u, v);
        EXPECT_LE(std::abs(r.total), 1e-12);
        EXPECT_EQ(r.order_half, 0.0);
        EXPECT_TRUE(r.monotone);
      }
}

TEST(Deficiency, SymmetricIntervalCancels) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> p(0.001, 0.499);
  std::vector<EtaSet> sets{EtaSet::logistic(), EtaSet::normal()};
  for (int i = 0; i < 200; ++i) sets.push_back(random_etas(rng));
  for (const EtaSet& e : sets) {
    const double u = 1.0 - (1.0 - p(rng));
    for (std::size_t n : {1u, 10u, 100u, 10000u})
      EXPECT_LE(std::abs(deficiency(e, n, u, 1.0 - u).total), 1e-12);
  }
}

TEST(Deficiency, InexactMirrorStaysAtRoundingLevel) {
  // When 1 - u is rounded the cancellation is only as good as the
  // conditioning of the large-eta coefficients.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> p(0.001, 0.499);
  for (int i = 0; i < 200; ++i) {
    const EtaSet e = random_etas(rng);
    const double u = p(rng);
    EXPECT_LE(std::abs(deficiency(e, 10, u, 1.0 - u).total), 1e-9);
  }
}

TEST(Deficiency, OrderOneMatchesClosedForm) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> p(0.001, 0.999);
  for (int i = 0; i < 3000; ++i) {
    const EtaSet e = random_etas(rng);
    double u = p(rng), v = p(rng);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    for (std::size_t n : {1u, 10u, 10000u}) {
      const auto r = deficiency(e, n, u, v);
      const double t = third_order_term(e, n, u, v);
      // The bracket cancels for v near 1-u; tolerance follows the size of
      // the individual products rather than of the result.
      const double zu = std::abs(r.z_u), zv = std::abs(r.z_v);
      const double bracket_scale = zv * zv * zv + zu * zu * zu + zu * zv * zv + zu * zu * zv;
      const double coeff_scale = 12 + 12 * std::abs(e.eta2) + 3 * e.eta3 * e.eta3 + 4 * std::abs(e.eta4);
      const double scale = std::max(std::abs(t), coeff_scale * bracket_scale / (96.0 * n));
      EXPECT_LE(std::abs(r.order_one - t), 1e-12 * scale);
    }
  }
}

TEST(Deficiency, TotalMatchesDirectRoute) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> p(0.01, 0.99);
  for (int i = 0; i < 1000; ++i) {
    const EtaSet e = random_etas(rng);
    double u = p(rng), v = p(rng);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    const std::size_t n = 1 + rng() % 500;
    const double direct = cf_quantile(e, n, v) - cf_quantile(e, n, u) - epsilon_tilde(e, n, u, v);
    const double scale = std::abs(cf_quantile(e, n, v)) + std::abs(cf_quantile(e, n, u)) +
                         std::abs(epsilon_tilde(e, n, u, v));
    EXPECT_LE(std::abs(deficiency(e, n, u, v).total - direct), 1e-12 * std::max(1.0, scale));
  }
}

TEST(Deficiency, LogisticExample) {
  const auto r = deficiency(EtaSet::logistic(), 100, 0.1, 0.8);
  const double zu = std_normal_quantile(0.1), zv = std_normal_quantile(0.8);
  const double bracket = zv * zv * zv - zu * zu * zu + zu * zv * zv - zu * zu * zv;
  EXPECT_NEAR(r.total, 12.0 / 5.0 * bracket / 9600.0, 1e-15);
  EXPECT_NEAR(r.total, 1.02729024255773e-4, 1e-8);
  EXPECT_EQ(r.order_three_halves, 0.0);
  EXPECT_NEAR(third_order_term(EtaSet::logistic(), 100, 0.1, 0.8), r.total, 1e-16);
}

TEST(Deficiency, NormalVanishesIdentically) {
  for (double u : {0.01, 0.2})
    for (double v : {0.5, 0.99})
      EXPECT_LE(std::abs(deficiency(EtaSet::normal(), 5, u, v).total), 1e-15);
}

TEST(Deficiency, FlagsNonMonotoneExpansion) {
  // A strongly negative z^2 coefficient bends the truncated quantile over.
  const EtaSet e{1.0, -50.0, 0.0, 50.0, 0.0, 0.0};
  EXPECT_LT(cf_quantile_slope(e, 1, 0.999), 0.0);
  const auto r = deficiency(e, 1, 0.001, 0.999);
  EXPECT_FALSE(r.monotone);
  EXPECT_TRUE(std::isfinite(r.total));
}

TEST(Deficiency, RejectsDegenerateInterval) {
  EXPECT_THROW(deficiency(kZero, 10, 0.3, 0.3), std::invalid_argument);
  EXPECT_THROW(third_order_term(kZero, 10, 0.3, 0.2), std::invalid_argument);
}
