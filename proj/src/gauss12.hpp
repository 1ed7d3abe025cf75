#pragma once
// Shared 12-point Gauss-Legendre rule with an embedded symmetric 6-node
// estimate (internal to the library; used by the disk quadrature cells and
// the conformal-map segment integrals).

#include <array>
#include <cmath>

#include "bpl/util.hpp"

namespace bpl::detail {

struct GaussRule {
  std::array<double, 12> x;  // nodes on (-1,1), ascending
  std::array<double, 12> w;  // weights, sum 2
  // Symmetric six-node subset whose reweighting integrates degree <= 5
  // exactly; the difference against the full rule is the cell error estimate.
  std::array<int, 6> sub_idx{{0, 2, 4, 7, 9, 11}};
  std::array<double, 6> sub_w{};
};

inline double legendre12(int n, double t, double* deriv) {
  double p0 = 1.0, p1 = t;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  *deriv = n * (t * p1 - p0) / (t * t - 1.0);
  return p1;
}

inline GaussRule make_gauss_rule() {
  GaussRule g;
  constexpr int n = 12;
  for (int i = 0; i < n / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double d = 0.0;
    for (int it = 0; it < 80; ++it) {
      const double p = legendre12(n, t, &d);
      const double step = p / d;
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    legendre12(n, t, &d);
    const double w = 2.0 / ((1.0 - t * t) * d * d);
    g.x[n - 1 - i] = t;  // positive roots come out in descending order
    g.x[i] = -t;
    g.w[n - 1 - i] = w;
    g.w[i] = w;
  }
  // Pair weights u0,u1,u2 for nodes (+-a0, +-a1, +-a2) matching the moments
  // of 1, t^2, t^4 (odd moments vanish by symmetry): 3x3 Cramer solve.
  const double a0 = g.x[11], a1 = g.x[9], a2 = g.x[7];
  const double m0 = 1.0, m2 = 1.0 / 3.0, m4 = 1.0 / 5.0;  // halved moments
  auto det3 = [](double a, double b, double c, double d, double e, double f,
                 double gg, double h, double i) {
    return a * (e * i - f * h) - b * (d * i - f * gg) + c * (d * h - e * gg);
  };
  const double p0 = a0 * a0, p1 = a1 * a1, p2 = a2 * a2;
  const double den = det3(1, 1, 1, p0, p1, p2, p0 * p0, p1 * p1, p2 * p2);
  const double u0 = det3(m0, 1, 1, m2, p1, p2, m4, p1 * p1, p2 * p2) / den;
  const double u1 = det3(1, m0, 1, p0, m2, p2, p0 * p0, m4, p2 * p2) / den;
  const double u2 = det3(1, 1, m0, p0, p1, m2, p0 * p0, p1 * p1, m4) / den;
  g.sub_w = {u0, u1, u2, u2, u1, u0};
  return g;
}

inline const GaussRule& gauss12() {
  static const GaussRule g = make_gauss_rule();
  return g;
}

}  // namespace bpl::detail
