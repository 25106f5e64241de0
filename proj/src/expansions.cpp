#include "effilab/expansions.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "effilab/expansion_coefficients.hpp"

namespace effilab {

namespace {

coeff::Etas<double> etas_of(const EtaSet& e) { return {e.eta2, e.eta3, e.eta4, e.eta5, e.eta6}; }

void require_n(std::size_t n) {
  if (n < 1) throw std::invalid_argument("sample size n must be at least 1");
}

void require_open_unit(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
  }
}

struct Powers {
  double root;       // sqrt(n)
  double inv_n;      // 1 / n
  double inv_n_root; // 1 / (n sqrt(n))
};

Powers powers(std::size_t n) {
  const double nd = static_cast<double>(n);
  const double root = std::sqrt(nd);
  return {root, 1.0 / nd, 1.0 / (nd * root)};
}

constexpr double den(long long d) { return static_cast<double>(d); }

}  // namespace

double cf_quantile(const EtaSet& e, std::size_t n, double v) {
  require_n(n);
  require_open_unit(v, "v");
  const double z = std_normal_quantile(v);
  const auto c = coeff::cornish_fisher(etas_of(e));
  const auto p = powers(n);
  const double z2 = z * z;
  const double half = c.h1_num * z / den(coeff::kCfHalfDen) / p.root;
  const double one = (c.a2 * z2 + c.a0) / den(coeff::kCfOneDen) * p.inv_n;
  const double three_halves =
      (c.c3_num * z2 / den(coeff::kCfC3Den) + c.c1_num / den(coeff::kCfC1Den)) * z /
      den(coeff::kCfThreeHalvesDen) * p.inv_n_root;
  return z * (1.0 + half + one + three_halves);
}

double cf_quantile_slope(const EtaSet& e, std::size_t n, double v) {
  require_n(n);
  require_open_unit(v, "v");
  const double z = std_normal_quantile(v);
  const auto c = coeff::cornish_fisher(etas_of(e));
  const auto p = powers(n);
  const double z2 = z * z;
  return 1.0 + 2.0 * c.h1_num * z / den(coeff::kCfHalfDen) / p.root +
         (3.0 * c.a2 * z2 + c.a0) / den(coeff::kCfOneDen) * p.inv_n +
         (4.0 * c.c3_num * z2 * z / den(coeff::kCfC3Den) +
          2.0 * c.c1_num * z / den(coeff::kCfC1Den)) /
             den(coeff::kCfThreeHalvesDen) * p.inv_n_root;
}

double epsilon_tilde(const EtaSet& e, std::size_t n, double u, double v) {
  require_n(n);
  require_open_unit(u, "u");
  require_open_unit(v, "v");
  if (u > v) throw std::invalid_argument("epsilon_tilde requires u <= v");
  if (u == v) return 0.0;
  const double zu = std_normal_quantile(u);
  const double zv = std_normal_quantile(v);
  const auto c = coeff::epsilon(etas_of(e));
  const auto p = powers(n);

  const double d1 = zv - zu;
  const double d2 = zv * zv - zu * zu;
  const double d3 = zv * zv * zv - zu * zu * zu;
  const double d21 = zv * zv * zu - zu * zu * zv;
  const double d4 = zv * zv * zv * zv - zu * zu * zu * zu;
  const double d31 = zv * zv * zv * zu - zu * zu * zu * zv;

  const double half = c.h1_num * d2 / den(coeff::kCfHalfDen) / p.root;
  const double one = (c.p3 * d3 + c.p21 * d21 + c.p1 * d1) / den(coeff::kEpsOneDen) * p.inv_n;
  const double three_halves =
      (c.d4 * d4 + c.d31 * d31 + c.d2 * d2) / den(coeff::kEpsThreeHalvesDen) * p.inv_n_root;
  return d1 + half + one + three_halves;
}

DeficiencyReport deficiency(const EtaSet& e, std::size_t n, double u, double v) {
  require_n(n);
  require_open_unit(u, "u");
  require_open_unit(v, "v");
  if (!(u < v)) throw std::invalid_argument("deficiency requires u < v");

  DeficiencyReport r;
  r.etas = e;
  r.n = n;
  r.u = u;
  r.v = v;
  r.z_u = std_normal_quantile(u);
  r.z_v = std_normal_quantile(v);

  const double zu = r.z_u;
  const double zv = r.z_v;
  const auto k = coeff::deficiency(etas_of(e));
  const auto p = powers(n);

  const double d1 = zv - zu;
  const double d2 = zv * zv - zu * zu;
  const double d3 = zv * zv * zv - zu * zu * zu;
  const double d21 = zv * zv * zu - zu * zu * zv;
  const double d4 = zv * zv * zv * zv - zu * zu * zu * zu;
  const double d31 = zv * zv * zv * zu - zu * zu * zu * zv;

  r.order_half = k.k_half * d2 / den(coeff::kCfHalfDen) / p.root;
  r.order_one = (k.k3 * d3 + k.k21 * d21 + k.k1 * d1) / den(coeff::kDefOneDen) * p.inv_n;
  r.order_three_halves = (k.k4 * d4 / den(coeff::kDefZ4Den) +
                          (k.k31 * d31 + k.k2 * d2) / den(coeff::kDefThreeHalvesDen)) *
                         p.inv_n_root;
  r.total = r.order_half + r.order_one + r.order_three_halves;

  r.monotone = cf_quantile_slope(e, n, u) > 0.0 && cf_quantile_slope(e, n, v) > 0.0 &&
               cf_quantile(e, n, u) < cf_quantile(e, n, v);
  return r;
}

double third_order_term(const EtaSet& e, std::size_t n, double u, double v) {
  require_n(n);
  require_open_unit(u, "u");
  require_open_unit(v, "v");
  if (!(u < v)) throw std::invalid_argument("third_order_term requires u < v");
  const double zu = std_normal_quantile(u);
  const double zv = std_normal_quantile(v);
  const double bracket = zv * zv * zv - zu * zu * zu + zu * zv * zv - zu * zu * zv;
  return -third_order_coeff(e) * bracket / (96.0 * static_cast<double>(n));
}

}  // namespace effilab
