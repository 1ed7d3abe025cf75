#pragma once
// The Schur algorithm: extraction of Schur parameters from the initial Taylor
// coefficients of a function bounded by 1 on the disk, and synthesis of a
// finite Blaschke product (as a rational function) with prescribed initial
// coefficients -- the coefficient-matching step behind the lower-bound
// construction.
//
// Parameter extraction works on truncated power series in fraction form: the
// current iterate f_j is carried as a coefficient pair (A_j, B_j) with
// f_j = A_j/B_j, and one step of
//     f_{j+1}(z) = (1/z) (f_j(z) - g_j) / (1 - conj(g_j) f_j(z))
// becomes A_{j+1} = (A_j - g_j B_j)/z, B_{j+1} = B_j - conj(g_j) A_j, with
// g_j = A_j[0]/B_j[0]. Series lengths shrink by one per step, each step is
// linear in the remaining length (quadratic total), and no series division
// ever happens; the pair is renormalized to B_j[0] = 1 each step. Extended
// precision is used throughout the recursion.

#include <span>
#include <vector>

#include "bpl/rational.hpp"
#include "bpl/util.hpp"

namespace bpl {

struct SchurParameters {
  std::vector<cplx> gammas;   // interior parameters, every |gamma| < 1
  cplx tail_phase{1.0, 0.0};  // terminating unimodular parameter
};

// Result of parameter extraction. When the recursion meets a unimodular
// parameter at step j (|g_j| >= 1 - 1e-10), the input is numerically a
// Blaschke product of degree j: this is a documented success mode, reported
// with the step index, and the returned parameters are then complete
// (gammas[0..j) plus the normalized boundary parameter as tail_phase).
struct SchurAnalysis {
  SchurParameters params;
  bool early_termination = false;
  int termination_step = -1;  // the j whose parameter reached the circle
};

// Schur parameters of the function with initial Taylor coefficients
// c_0..c_{m-1}. Requires the coefficients to come from a function bounded by
// 1 in sup norm; inputs violating that surface as parameters outside the
// closed disk, which throws ("not a Schur-class coefficient sequence",
// triggered beyond |gamma| > 1 + 1e-8).
SchurAnalysis schur_parameters(std::span<const cplx> coeffs);

// The finite Blaschke product with the given parameter sequence, built by the
// backward recursion
//     f_j = (g_j + z f_{j+1}) / (1 + conj(g_j) z f_{j+1})
// from the constant tail_phase, as a numerator/denominator pair of degree at
// most gammas.size(). Unimodular on |z| = 1; poles outside the closed disk.
// Throws when an interior parameter has |gamma| > 1 - 1e-10 or the tail is
// not unimodular within 1e-12.
RationalFunction reconstruct(const SchurParameters& params);

// Composition: a finite Blaschke product of degree <= coeffs.size() whose
// first coeffs.size() Taylor coefficients are exactly the prescribed ones
// (within 1e-9 per coefficient, verified internally by re-expanding the
// result -- failure to match throws rather than returning a silently wrong
// product). When extraction terminates early the exact lower-degree product
// is returned (its coefficients still match all of coeffs) and the requested
// tail_phase is ignored in favour of the recovered boundary parameter.
RationalFunction blaschke_from_taylor(std::span<const cplx> coeffs,
                                      cplx tail_phase = cplx{1.0, 0.0});

}  // namespace bpl
