#pragma once
// Rational functions R = num/den with degree and pole bookkeeping:
// construction from zero/pole lists or explicit polynomial pairs, stable
// evaluation of R and R' (factored form preferred when recorded), circle-grid
// evaluation for quadrature, and an exterior-clearance check of the poles
// against a target domain.

#include <optional>
#include <span>
#include <vector>

#include "bpl/complexpoly.hpp"
#include "bpl/kernels.hpp"
#include "bpl/quadrature.hpp"
#include "bpl/util.hpp"

namespace bpl {

class DomainMap;  // bpl/domains.hpp

class RationalFunction {
 public:
  // Polynomial R (denominator 1); the pole list is known and empty.
  explicit RationalFunction(ComplexPoly num);

  // Expanded numerator/denominator. The pole list is unknown unless den is
  // constant (no root finding is attempted). Throws when den is identically 0.
  RationalFunction(ComplexPoly num, ComplexPoly den);

  // scale * prod_i (w - zeros_i) / prod_j (w - poles_j), retained in factored
  // form and also expanded. Throws when scale = 0 or when a zero collides
  // with a pole within 1e-12 (no automatic simplification -- callers must
  // cancel common factors themselves).
  static RationalFunction from_poles_zeros(std::span<const cplx> zeros,
                                           std::span<const cplx> poles,
                                           cplx scale);

  // max(deg num, deg den).
  int degree() const;

  const ComplexPoly& num() const { return num_; }
  const ComplexPoly& den() const { return den_; }
  bool is_polynomial() const { return den_.degree() == 0; }

  // Roots of the denominator with multiplicity when the construction recorded
  // them (factored builds; polynomial builds record the empty list). nullopt
  // for an expanded rational with nonconstant denominator.
  const std::optional<std::vector<cplx>>& poles() const { return poles_; }

  // Pointwise evaluation. Throws when w is within 1e-10 of a known pole (or
  // when the denominator vanishes to roundoff for expanded forms).
  cplx eval(cplx w) const;
  cplx deriv(cplx w) const;

  // Batch values val[i] = R(w_i) and derivatives dval[i] = R'(w_i); either
  // output may be null. No pole-proximity guard: callers establish clearance
  // up front (the experiment drivers validate poles against the domain before
  // integrating).
  void eval_batch(const double* wr, const double* wi, size_t npts, cplx* val,
                  cplx* dval) const;

  // Values and derivatives on the uniform circle grid
  // r*exp(i(2*pi*k/N + offset)), N = val.size(), by FFT evaluation of the
  // expanded numerator/denominator. dval may be empty.
  void circle_values(double r, double offset, std::span<cplx> val,
                     std::span<cplx> dval) const;

  // Distance from the unit circle to the nearest denominator root, from the
  // recorded pole list when present, else estimated from the tail decay of
  // the denominator coefficients. 0 for polynomials (no finite poles, but
  // also no analyticity margin to exploit beyond the degree hint).
  double pole_margin() const;

  // Taylor coefficients c_0..c_{count-1} of R at 0 by series division
  // (stable when the denominator is zero-free in the closed unit disk).
  // Throws when den(0) vanishes.
  std::vector<cplx> taylor(int count) const;

 private:
  RationalFunction() = default;

  ComplexPoly num_, den_;    // expanded forms
  ComplexPoly dnum_, dden_;  // their derivatives (cached at construction)
  std::optional<std::vector<cplx>> zeros_;
  std::optional<std::vector<cplx>> poles_;
  kernels::RationalFactors factors_;  // factored evaluation data
  bool factored_ = false;
};

// Result of the pole-clearance test: `unknown` is reported (never a silent
// `ok`) when the pole list is unavailable.
enum class PoleCheck { ok, violation, unknown };

// True exterior test: every recorded pole of r lies outside the closed target
// region of d with clearance >= margin. Polynomials pass vacuously. Defined
// alongside the domain geometry in domains.cpp.
PoleCheck validate_poles_outside(const DomainMap& d, const RationalFunction& r,
                                 double margin);

// Quadrature handles over the unit-circle grids of the z-plane (used when the
// rational function lives on the disk itself, e.g. Blaschke products built by
// the coefficient-matching step). Both keep a pointer to r, which must
// outlive the handle.
quad::CircleFn rational_fn(const RationalFunction& r);        // values of R
quad::CircleFn rational_deriv_fn(const RationalFunction& r);  // values of R'

}  // namespace bpl
