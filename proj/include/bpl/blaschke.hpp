#pragma once
// Finite Blaschke products: construction from zeros, evaluation of B and B',
// Taylor sections, and the Bloch seminorm evaluator.

#include <functional>
#include <span>
#include <vector>

#include "bpl/kernels.hpp"
#include "bpl/util.hpp"

namespace bpl {

// B(z) = front * prod_k factor_k(z) with factor_k = (z_k - z)/(1 - conj(z_k) z)
// for z_k != 0 and factor_k = z for z_k = 0.
class BlaschkeProduct {
 public:
  // Rejects zeros with |z_k| > 1 - 1e-12 (ill-conditioned factor, reported
  // with the offending index) and non-unimodular front factors.
  explicit BlaschkeProduct(std::vector<cplx> zeros, cplx front = {1.0, 0.0});

  int degree() const { return int(zeros_.size()); }
  const std::vector<cplx>& zeros() const { return zeros_; }
  cplx front_factor() const { return front_; }
  int origin_zero_count() const { return origin_count_; }
  double max_zero_radius() const { return max_radius_; }

  cplx eval(cplx z) const;    // |z| <= 1
  cplx deriv(cplx z) const;

  // B and B' at a batch of points (either output may be null).
  void eval_batch(const double* zr, const double* zi, size_t npts, cplx* val,
                  cplx* dval) const;

  // Taylor coefficients c_0..c_m of B at 0 via circle sampling and discrete
  // Fourier inversion; absolute error ~1e-11 per coefficient.
  std::vector<cplx> taylor_coeffs(int m) const;

 private:
  std::vector<cplx> zeros_;
  cplx front_;
  int origin_count_ = 0;
  double max_radius_ = 0.0;
  kernels::BlaschkeFactors fac_;  // zeros away from the origin
};

// Certified lower bound on the Bloch seminorm sup (1-|z|^2)|f'(z)|, sampled
// on the given radius grid with angle_count angles per circle. `fprime`
// supplies f' pointwise.
double bloch_seminorm(const std::function<cplx(cplx)>& fprime,
                      std::span<const double> r_grid, int angle_count);

}  // namespace bpl
