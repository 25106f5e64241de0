#pragma once

// Polynomial coefficients of the Cornish-Fisher quantile expansion of the
// standardized location MLE and of the Neyman-Pearson length expansion.
//
// Every rational constant is cleared to a common integer denominator, so the
// numerators are integer combinations of eta products. Instantiated with
// double they are exact whenever the etas are small integers (the Gumbel
// table); instantiated with an exact rational type they give the symbolic
// values used in tests.

namespace effilab::coeff {

template <class T>
struct Etas {
  T eta2, eta3, eta4, eta5, eta6;
};

/// Cornish-Fisher quantile:
///   z [1 + h1 z / sqrt(n) + (a2 z^2 + a0) / (72 n) + (c3 z^3 + c1 z) / (144 n sqrt(n))]
template <class T>
struct CornishFisher {
  T h1_num;  ///< h1 = h1_num / 12
  T a2;      ///< -9 + 12 eta2 - eta3^2 - 5 eta4
  T a0;      ///< -9 - 2 eta3^2 + 3 eta4
  T c3_num;  ///< c3 = c3_num / 60
  T c1_num;  ///< c1 = c1_num / 45
};

inline constexpr long long kCfHalfDen = 12;
inline constexpr long long kCfOneDen = 72;
inline constexpr long long kCfC3Den = 60;
inline constexpr long long kCfC1Den = 45;
inline constexpr long long kCfThreeHalvesDen = 144;

template <class T>
CornishFisher<T> cornish_fisher(const Etas<T>& e) {
  const T e3sq = e.eta3 * e.eta3;
  const T e3cube = e3sq * e.eta3;
  return {
      e.eta3,
      T(-9) + T(12) * e.eta2 - e3sq - T(5) * e.eta4,
      T(-9) - T(2) * e3sq + T(3) * e.eta4,
      T(360) * e.eta2 * e.eta3 - T(180) * e.eta3 - T(95) * e3cube - T(60) * e.eta3 * e.eta4 +
          T(288) * e.eta5 - T(1080) * e.eta6,
      T(540) * e.eta2 * e.eta3 - T(675) * e.eta3 - T(335) * e3cube + T(135) * e.eta3 * e.eta4 -
          T(81) * e.eta5,
  };
}

/// Neyman-Pearson length expansion:
///   (z_v - z_u) + h1 (z_v^2 - z_u^2) / (12 sqrt(n))
///   + [p3 (z_v^3 - z_u^3) + p21 (z_v^2 z_u - z_u^2 z_v) + p1 (z_v - z_u)] / (288 n)
///   + [d4 (z_v^4 - z_u^4) + d31 (z_v^3 z_u - z_u^3 z_v) + d2 (z_v^2 - z_u^2)] / (12960 n^(3/2))
template <class T>
struct Epsilon {
  T h1_num;
  T p3, p21, p1;
  T d4, d31, d2;
};

inline constexpr long long kEpsOneDen = 288;
inline constexpr long long kEpsThreeHalvesDen = 12960;

template <class T>
Epsilon<T> epsilon(const Etas<T>& e) {
  const T e3sq = e.eta3 * e.eta3;
  const T e3cube = e3sq * e.eta3;
  return {
      e.eta3,
      T(12) * e.eta2 + T(5) * e3sq - T(8) * e.eta4,
      T(36) - T(36) * e.eta2 + T(9) * e3sq + T(12) * e.eta4,
      T(-36) - T(8) * e3sq + T(12) * e.eta4,
      T(270) * e.eta2 * e.eta3 + T(60) * e3cube - T(180) * e.eta3 * e.eta4 + T(162) * e.eta5 -
          T(540) * e.eta6,
      T(-540) * e.eta2 * e.eta3 + T(540) * e.eta3 + T(270) * e3cube - T(270) * e.eta5 +
          T(1080) * e.eta6,
      T(-270) * e.eta3 - T(400) * e3cube + T(630) * e.eta3 * e.eta4 - T(162) * e.eta5,
  };
}

/// Coefficients of the difference Gtilde(v) - Gtilde(u) - epsilon_tilde,
/// grouped by order and brought to a common denominator per order.
///
///   n^-1:   [k3 (z_v^3 - z_u^3) + k21 (z_v^2 z_u - z_u^2 z_v) + k1 (z_v - z_u)] / 288
///   n^-3/2: k4 (z_v^4 - z_u^4) / 25920 + [k31 (z_v^3 z_u - z_u^3 z_v) + k2 (z_v^2 - z_u^2)] / 12960
template <class T>
struct Deficiency {
  T k_half;  ///< numerator over 12 of the n^-1/2 coefficient of (z_v^2 - z_u^2)
  T k3, k21, k1;
  T k4, k31, k2;
};

inline constexpr long long kDefOneDen = 288;
inline constexpr long long kDefZ4Den = 25920;
inline constexpr long long kDefThreeHalvesDen = 12960;

template <class T>
Deficiency<T> deficiency(const Etas<T>& e) {
  const auto cf = cornish_fisher(e);
  const auto ep = epsilon(e);
  // 288 / 72 = 4; 25920 / (144 * 60) = 3; 12960 / (144 * 45) = 2.
  return {
      cf.h1_num - ep.h1_num,
      T(4) * cf.a2 - ep.p3,
      -ep.p21,
      T(4) * cf.a0 - ep.p1,
      T(3) * cf.c3_num - T(2) * ep.d4,
      -ep.d31,
      T(2) * cf.c1_num - ep.d2,
  };
}

}  // namespace effilab::coeff
