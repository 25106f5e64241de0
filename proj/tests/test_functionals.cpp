#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "effilab/functionals.hpp"
#include "oracles.hpp"

using namespace effilab;

namespace {

const Family kFamilies[] = {Family::GumbelMin, Family::Normal, Family::Logistic};

void expect_etas_near(const EtaSet& got, const EtaSet& want, double tol) {
  EXPECT_NEAR(got.fisher_information, want.fisher_information, tol);
  EXPECT_NEAR(got.eta2, want.eta2, tol);
  EXPECT_NEAR(got.eta3, want.eta3, tol);
  EXPECT_NEAR(got.eta4, want.eta4, tol);
  EXPECT_NEAR(got.eta5, want.eta5, tol);
  EXPECT_NEAR(got.eta6, want.eta6, tol);
}

}  // namespace

TEST(Oracle, SymbolicEtasMatchClosedFormTables) {
  const auto g = oracle::exact_etas(oracle::gumbel_family());
  EXPECT_EQ(g.info, oracle::Q(1));
  EXPECT_EQ(g.psi2_sq, oracle::Q(5));
  EXPECT_EQ(g.psi1_cube, oracle::Q(-2));
  EXPECT_EQ(g.psi1_four, oracle::Q(9));
  EXPECT_EQ(g.psi1_five, oracle::Q(-44));
  EXPECT_EQ(g.psi23, oracle::Q(-13));

  const auto l = oracle::exact_etas(oracle::logistic_family());
  EXPECT_EQ(l.info, oracle::Q(1, 3));
  EXPECT_EQ(l.psi2_sq / (l.info * l.info), oracle::Q(9, 5));
  EXPECT_EQ(l.psi1_four / (l.info * l.info), oracle::Q(9, 5));
  EXPECT_EQ(l.psi1_cube, oracle::Q(0));
  EXPECT_EQ(l.psi23, oracle::Q(0));

  expect_etas_near(oracle::exact_etas(oracle::normal_family()).to_double(), EtaSet::normal(), 0.0);
  expect_etas_near(g.to_double(), EtaSet::gumbel(), 0.0);
  expect_etas_near(l.to_double(), EtaSet::logistic(), 1e-15);
}

TEST(Functionals, FisherInformationExamples) {
  EXPECT_NEAR(fisher_information(LocationDensity::gumbel_min()), 1.0, 1e-10);
  EXPECT_NEAR(fisher_information(LocationDensity::gumbel_min(0.0, 2.0)), 0.25, 1e-10);
  EXPECT_NEAR(fisher_information(LocationDensity::logistic()), 1.0 / 3.0, 1e-10);
  EXPECT_NEAR(fisher_information(LocationDensity::normal(3.0, 0.5)), 4.0, 1e-9);
}

TEST(Functionals, EtaSetsMatchExactOracles) {
  expect_etas_near(eta_set(LocationDensity::gumbel_min()),
                   oracle::exact_etas(oracle::gumbel_family()).to_double(), 1e-8);
  expect_etas_near(eta_set(LocationDensity::normal()),
                   oracle::exact_etas(oracle::normal_family()).to_double(), 1e-8);
  expect_etas_near(eta_set(LocationDensity::logistic()),
                   oracle::exact_etas(oracle::logistic_family()).to_double(), 1e-8);
}

TEST(Functionals, EtaSetIsLocationScaleInvariant) {
  for (Family f : kFamilies) {
    const EtaSet base = eta_set(LocationDensity(f));
    for (double alpha : {-1.0, 2.0}) {
      for (double beta : {0.5, 3.0}) {
        const EtaSet e = eta_set(LocationDensity(f, alpha, beta));
        EXPECT_NEAR(e.fisher_information, base.fisher_information / (beta * beta), 1e-9);
        EXPECT_NEAR(e.eta2, base.eta2, 1e-8);
        EXPECT_NEAR(e.eta3, base.eta3, 1e-8);
        EXPECT_NEAR(e.eta4, base.eta4, 1e-8);
        EXPECT_NEAR(e.eta5, base.eta5, 1e-8);
        EXPECT_NEAR(e.eta6, base.eta6, 1e-8);
      }
    }
  }
}

TEST(Functionals, TwoSidedMapAgreesWithCdfSubstitution) {
  QuadratureSpec q;
  q.domain = DomainMap::TwoSidedExponential;
  for (Family f : kFamilies) {
    expect_etas_near(eta_set(LocationDensity(f), q), EtaSet::reference(f), 1e-8);
  }
}

TEST(Functionals, NonConvergenceIsReportedWithResidual) {
  QuadratureSpec q;
  q.max_refinements = 1;
  try {
    expectation(LocationDensity::gumbel_min(), [](double x) { return std::cos(40.0 * x); }, q);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(Functionals, UnderflowingScaleRaisesNumericalError) {
  EXPECT_THROW(eta_set(LocationDensity::gumbel_min(0.0, 1e200)), NumericalError);
  EXPECT_THROW(eta_set(LocationDensity::gumbel_min(0.0, 1e-200)), NumericalError);
}

TEST(Functionals, InvalidQuadratureSpecRejected) {
  QuadratureSpec q;
  q.rel_tol = 0.0;
  EXPECT_THROW(fisher_information(LocationDensity::normal(), q), std::invalid_argument);
  q = {};
  q.max_refinements = 0;
  EXPECT_THROW(fisher_information(LocationDensity::normal(), q), std::invalid_argument);
}

TEST(Functionals, IdentitySuiteVanishes) {
  for (Family f : kFamilies) {
    for (double beta : {0.5, 1.0, 3.0}) {
      const auto r = identity_suite(LocationDensity(f, 1.0, beta));
      EXPECT_LE(r.max_abs(), 1e-8) << to_string(f) << " beta=" << beta;
    }
  }
}

TEST(Functionals, CsGapExamples) {
  EXPECT_EQ(cs_gap(EtaSet::gumbel()), 0.0);
  EXPECT_NEAR(cs_gap(EtaSet::logistic()), 0.2, 1e-15);
  EXPECT_EQ(cs_gap(EtaSet::normal()), 0.0);
}

TEST(Functionals, ThirdOrderCoeffExamples) {
  EXPECT_EQ(third_order_coeff(EtaSet::gumbel()), 0.0);
  EXPECT_EQ(third_order_coeff(EtaSet::normal()), 0.0);
  EXPECT_NEAR(third_order_coeff(EtaSet::logistic()), -12.0 / 5.0, 1e-14);
}

TEST(Functionals, CsGapNonnegativeOnParameterGrid) {
  for (Family f : kFamilies)
    for (double alpha : {-1.0, 0.0, 2.0})
      for (double beta : {0.5, 1.0, 3.0})
        EXPECT_GE(cs_gap(eta_set(LocationDensity(f, alpha, beta))), -1e-10);
}

TEST(Functionals, ThirdOrderCoeffIsMinusTwelveGap) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> eta(-50.0, 50.0);
  for (int i = 0; i < 10000; ++i) {
    const EtaSet e{1.0, eta(rng), eta(rng), eta(rng), eta(rng), eta(rng)};
    const double t = third_order_coeff(e);
    const double g = cs_gap(e);
    // Relative to the size of the terms being combined.
    const double scale = 12.0 + 12.0 * std::abs(e.eta2) + 3.0 * e.eta3 * e.eta3 + 4.0 * std::abs(e.eta4);
    EXPECT_LE(std::abs(t + 12.0 * g), 1e-12 * scale);
  }
}

TEST(Functionals, DependenceResidualGumbel) {
  for (double beta : {0.5, 1.0, 2.0, 3.0}) {
    const auto r = cs_dependence_residual(LocationDensity::gumbel_min(0.7, beta), beta);
    EXPECT_EQ(r.outcome, DependenceResidual::Outcome::Resolved);
    EXPECT_LE(r.residual, 1e-10);
    EXPECT_NEAR(r.optimal_lambda, beta, 1e-8);
  }
  const auto r = cs_dependence_residual(LocationDensity::gumbel_min(), 2.0);
  EXPECT_NEAR(r.residual, 1.0, 1e-10);
  EXPECT_GE(r.residual, 0.0);
}

TEST(Functionals, DependenceResidualNormalIsDegenerate) {
  for (double lambda : {-3.0, 0.0, 1.0, 10.0}) {
    const auto r = cs_dependence_residual(LocationDensity::normal(), lambda);
    EXPECT_EQ(r.outcome, DependenceResidual::Outcome::Degenerate);
    EXPECT_LT(r.z_second_moment, 1e-12);
    // psi1 - lambda * 0 leaves E psi1^2 = I.
    EXPECT_NEAR(r.residual, 1.0, 1e-10);
  }
}

TEST(Functionals, DependenceResidualLogisticMinimizedAtOptimalLambda) {
  const auto d = LocationDensity::logistic();
  const auto best = cs_dependence_residual(d, 0.0);
  ASSERT_EQ(best.outcome, DependenceResidual::Outcome::Resolved);
  const double lam = best.optimal_lambda;
  const double at = cs_dependence_residual(d, lam).residual;
  EXPECT_LT(at, cs_dependence_residual(d, lam + 0.1).residual);
  EXPECT_LT(at, cs_dependence_residual(d, lam - 0.1).residual);
  // Residual at the optimum is I - (E psi1 Z)^2 / E Z^2 with E psi1 Z = 0.
  EXPECT_NEAR(at, 1.0 / 3.0, 1e-10);
}
