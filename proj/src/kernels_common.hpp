#pragma once
// Shared pieces of the factored-product kernels: per-point running state,
// renormalization thresholds, and the final ratio assembly. Used by both the
// scalar and the AVX2 translation units so the variants stay in lockstep.

#include <cmath>

#include "bpl/kernels.hpp"

namespace bpl::kernels::detail {

constexpr double kBig = 0x1p200;
constexpr double kSmall = 0x1p-200;
constexpr double kDown = 0x1p-128;
constexpr double kUp = 0x1p128;

struct State {
  double xr = 1.0, xi = 0.0;  // running product
  double dr = 0.0, di = 0.0;  // its derivative
  int e = 0;                  // power-of-two exponent offset

  // product-rule step for a factor f with derivative fp:
  // d <- d*f + fp*x ; x <- x*f
  inline void step(double fr, double fi, double fpr, double fpi) {
    double t = dr * fr - di * fi + (fpr * xr - fpi * xi);
    di = dr * fi + di * fr + (fpr * xi + fpi * xr);
    dr = t;
    t = xr * fr - xi * fi;
    xi = xr * fi + xi * fr;
    xr = t;
  }

  inline void renorm() {
    double m2 = xr * xr + xi * xi + dr * dr + di * di;
    if (m2 > kBig) {
      xr *= kDown; xi *= kDown; dr *= kDown; di *= kDown;
      e += 128;
    } else if (m2 < kSmall && m2 > 0.0) {
      xr *= kUp; xi *= kUp; dr *= kUp; di *= kUp;
      e -= 128;
    }
  }
};

// val = s*(A/C)*2^(eA-eC), dval = s*(A'C - AC')/C^2 * 2^(eA-eC).
inline void assemble(const State& a, const State& c, cplx s, cplx* val,
                     cplx* dval) {
  int d = a.e - c.e;
  double c2 = c.xr * c.xr + c.xi * c.xi;
  if (val) {
    double qr = (a.xr * c.xr + a.xi * c.xi) / c2;
    double qi = (a.xi * c.xr - a.xr * c.xi) / c2;
    *val = cplx(std::ldexp(qr, d), std::ldexp(qi, d)) * s;
  }
  if (dval) {
    double tr = (a.dr * c.xr - a.di * c.xi) - (a.xr * c.dr - a.xi * c.di);
    double ti = (a.dr * c.xi + a.di * c.xr) - (a.xr * c.di + a.xi * c.dr);
    double wr = (c.xr * c.xr - c.xi * c.xi) / c2;  // C^2 / |C|^2
    double wi = (2.0 * c.xr * c.xi) / c2;
    // T / C^2 = T * conj(C^2/|C|^2) / |C|^2
    double qr = (tr * wr + ti * wi) / c2;
    double qi = (ti * wr - tr * wi) / c2;
    *dval = cplx(std::ldexp(qr, d), std::ldexp(qi, d)) * s;
  }
}

}  // namespace bpl::kernels::detail
