#pragma once
// All integrals: circle means, weighted disk/annulus area integrals, Hardy
// norms, and the area-identity self-check, with certified error estimates.
//
// Conventions (used consistently everywhere):
//   * dA carries the 1/pi normalization: integral over the full unit disk of
//     1 dA equals 1.
//   * circle means carry 1/(2*pi).
//   * Radial partitions refine geometrically toward r = 1 with breakpoints
//     1 - 2^{-k}.
//
// Angular rule: periodic trapezoid with node doubling. The stopping rule
// measures the sampled integrand's spectrum (one real FFT per level) and
// bounds the aliasing error from the observed top-octave decay; insufficient
// decay forces another doubling, so the estimate only ever adds refinement
// over plain doubling agreement.

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "bpl/blaschke.hpp"
#include "bpl/complexpoly.hpp"
#include "bpl/util.hpp"

namespace bpl::quad {

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  long node_count = 0;
  bool converged = false;
};

// A function sampled on uniform circle grids. The grid of level (N, half)
// consists of angles th_j = 2*pi*j/N + (half ? pi/N : 0).
struct CircleFn {
  // Fill out[0..count) with f(r e^{i th_j}) for j = k0..k0+count; cs/sn hold
  // cos(th_j)/sin(th_j) for the same range. Must be thread-compatible.
  std::function<void(double r, size_t n, bool half, size_t k0, size_t count,
                     const double* cs, const double* sn, cplx* out)>
      eval;
  // Optional whole-grid evaluator (e.g. FFT polynomial evaluation); used
  // instead of chunked eval when present and the grid fits in memory.
  std::function<void(double r, size_t n, bool half, cplx* out)> full_eval;
  double hint_degree = 0;     // angular content scale (~ degree)
  double spectral_scale = 0;  // analyticity margin beyond |z|=1 (0 = none)
  bool boundary_ok = false;   // continuous up to |z| = 1
};

// Same, but the handle produces real nonnegative integrand values directly
// (used for pulled-back integrands that are not a plain p-th power).
struct RealCircleFn {
  std::function<void(double r, size_t n, bool half, size_t k0, size_t count,
                     const double* cs, const double* sn, double* out)>
      eval;
  double hint_degree = 0;
  double spectral_scale = 0;
  bool boundary_ok = false;
};

// (1/2pi) integral of |f(r e^{it})|^p dt. r = 1 is allowed when the handle
// asserts boundary continuity. Node budget 2^22 per circle.
QuadratureResult circle_mean(const CircleFn& f, double r, double p,
                             double tol);

// (1/2pi) integral of g(r e^{it}) dt for a real-valued handle.
QuadratureResult circle_mean_real(const RealCircleFn& g, double r, double tol);

// Integral over {r_lo <= |z| <= r_hi} of |f'(z)|^p (1-|z|)^beta dA(z).
QuadratureResult disk_integral(const CircleFn& f_prime, double p, double beta,
                               double r_lo, double r_hi, double tol);

// Same radial machinery for a real integrand handle.
QuadratureResult disk_integral_real(const RealCircleFn& g, double beta,
                                    double r_lo, double r_hi, double tol);

// I(B) = integral over the disk of |B'| dA.
QuadratureResult I_of(const BlaschkeProduct& b, double tol);

// (quadrature of int |p'|^2 (1-|z|^2) dA, coefficient sum sum k/(k+1)|a_k|^2).
// The two agree within the quadrature error estimate.
std::pair<QuadratureResult, double> area_identity_check(const ComplexPoly& p);

struct HardyNorm {
  double value = 0.0;   // (circle mean at r_max)^{1/p}, a lower bound
  double r_max = 0.0;   // radius at which the mean was evaluated
  QuadratureResult mean;
};

// Certified lower bound for the H^p norm via the mean at r_max < 1.
HardyNorm hardy_norm(const CircleFn& f, double p, double r_max, double tol);

// Handle builders. The Blaschke handles keep a pointer to the product, which
// must outlive the handle; the polynomial handles own a copy.
CircleFn blaschke_deriv_fn(const BlaschkeProduct& b);  // values of B'
CircleFn blaschke_value_fn(const BlaschkeProduct& b);  // values of B
CircleFn poly_fn(const ComplexPoly& p);                // values of p
CircleFn poly_deriv_fn(const ComplexPoly& p);          // values of p'
CircleFn const_fn(cplx c);

}  // namespace bpl::quad
