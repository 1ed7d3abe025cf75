#pragma once
// Batch evaluation kernels for factored products and polynomials.
//
// Each kernel exists in a scalar reference variant and an AVX2 variant; the
// AVX2 code is compiled in its own translation unit with the extension
// enabled and is only entered after a runtime cpuid check. Variants follow
// the same renormalized recurrence and are equivalence-tested against each
// other; they are not guaranteed bit-identical (FMA contraction differs).
//
// Numerical scheme: running numerator/denominator pairs (A, A') and (C, C')
// are updated one factor at a time with the product rule and rescaled by
// powers of two every few factors, so arbitrary-degree products evaluate
// without overflow and without divisions inside the inner loop.

#include <cstddef>
#include <span>
#include <vector>

#include "bpl/util.hpp"

namespace bpl::kernels {

enum class Variant { scalar, avx2 };

bool cpu_has_avx2();

// Runtime-selected default (env BPLAB_KERNEL=scalar|avx2 overrides).
Variant preferred_variant();

// Zeros of a product prod_k (a_k - z) / (1 - conj(a_k) z), stored
// structure-of-arrays. Zeros at the origin are excluded (callers handle the
// z^m factor exactly).
struct BlaschkeFactors {
  std::vector<double> re, im;
  size_t count() const { return re.size(); }
};

// val[i] = prod_k (a_k - z_i)/(1 - conj(a_k) z_i), dval[i] its z-derivative.
// Either output may be null.
void blaschke_batch(const BlaschkeFactors& f, const double* zr,
                    const double* zi, size_t npts, cplx* val, cplx* dval,
                    Variant variant);

// Factored rational: scale * prod_j (w - zero_j) / prod_j (w - pole_j).
struct RationalFactors {
  std::vector<double> zr, zi;  // zeros
  std::vector<double> pr, pi;  // poles
  cplx scale{1.0, 0.0};
};

void rational_batch(const RationalFactors& f, const double* wr,
                    const double* wi, size_t npts, cplx* val, cplx* dval,
                    Variant variant);

// Horner evaluation of p (and optionally p') at arbitrary points.
void poly_batch(std::span<const cplx> coeffs, const double* zr,
                const double* zi, size_t npts, cplx* val, cplx* dval,
                Variant variant);

namespace detail {
void blaschke_batch_scalar(const BlaschkeFactors&, const double*, const double*,
                           size_t, cplx*, cplx*);
void blaschke_batch_avx2(const BlaschkeFactors&, const double*, const double*,
                         size_t, cplx*, cplx*);
void rational_batch_scalar(const RationalFactors&, const double*, const double*,
                           size_t, cplx*, cplx*);
void rational_batch_avx2(const RationalFactors&, const double*, const double*,
                         size_t, cplx*, cplx*);
void poly_batch_scalar(std::span<const cplx>, const double*, const double*,
                       size_t, cplx*, cplx*);
void poly_batch_avx2(std::span<const cplx>, const double*, const double*,
                     size_t, cplx*, cplx*);
}  // namespace detail

}  // namespace bpl::kernels
