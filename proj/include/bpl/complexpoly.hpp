#pragma once
// Dense complex polynomials and truncated power series: evaluation,
// differentiation, circle norms, and the Rudin-Shapiro generator used to
// build flat block polynomials.

#include <span>
#include <utility>
#include <vector>

#include "bpl/util.hpp"

namespace bpl {

class ComplexPoly {
 public:
  // Zero polynomial [0].
  ComplexPoly() : coeffs_{cplx{0.0, 0.0}} {}

  // Coefficients a_0..a_d; trailing zeros are stripped (at least one
  // coefficient is always kept, so the zero polynomial is [0]).
  explicit ComplexPoly(std::vector<cplx> coeffs);

  int degree() const { return int(coeffs_.size()) - 1; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }

  // Coefficient a_k; zero beyond the stored length.
  cplx coeff(size_t k) const {
    return k < coeffs_.size() ? coeffs_[k] : cplx{0.0, 0.0};
  }

  // Horner evaluation.
  cplx eval(cplx z) const;

  // Values (and optionally derivative values) at a batch of points.
  void eval_batch(const double* zr, const double* zi, size_t npts, cplx* val,
                  cplx* dval) const;

  // Values at N uniform circle points r*exp(i(2*pi*k/N + offset)); uses an
  // FFT when the grid is large, Horner otherwise. Both paths agree to
  // roundoff for coefficients of moderate size.
  void circle_values(double r, double offset, std::span<cplx> out) const;

  ComplexPoly derivative() const;

  // Antiderivative with constant term 0.
  ComplexPoly antiderivative() const;

  // (sum_k |a_k|^2 r^{2k})^{1/2}.
  double l2_coeff_norm(double r) const;

  // max_theta |p(r e^{i theta})|: coarse sampling at >= 16 (d+1) angles plus
  // golden-section refinement of the top brackets. Returns a certified lower
  // bound within (1+tol) of the maximum.
  double sup_norm_circle(double r, double tol) const;

 private:
  std::vector<cplx> coeffs_;
};

// Rudin-Shapiro pair (P_m, Q_m), +-1 coefficients of length 2^m:
// P_0 = Q_0 = [1], P_{m+1} = P_m + z^{2^m} Q_m, Q_{m+1} = P_m - z^{2^m} Q_m.
// Satisfies |P_m|^2 + |Q_m|^2 = 2^{m+1} on |z| = 1, so the sup norm of P_m
// is at most 2^{(m+1)/2}. Throws beyond m = 22 (coefficient-count cap).
std::pair<ComplexPoly, ComplexPoly> rudin_shapiro(int m);

// First n+1 coefficients of a power series as a polynomial.
ComplexPoly truncate(std::span<const cplx> coeffs, int n);

}  // namespace bpl
