#include <immintrin.h>

#include "kernels_common.hpp"

// AVX2 variants: four evaluation points per vector, factors broadcast.
// This translation unit is built with -mavx2 -mfma and entered only after a
// runtime cpuid check (see kernels_dispatch.cpp).

namespace bpl::kernels::detail {
namespace {

struct VState {
  __m256d xr, xi, dr, di, e;

  void init() {
    xr = _mm256_set1_pd(1.0);
    xi = _mm256_setzero_pd();
    dr = _mm256_setzero_pd();
    di = _mm256_setzero_pd();
    e = _mm256_setzero_pd();
  }

  // d <- d*f + fp*x ; x <- x*f   (complex, lanewise)
  inline void step(__m256d fr, __m256d fi, __m256d fpr, __m256d fpi) {
    __m256d t = _mm256_fmadd_pd(
        dr, fr,
        _mm256_fnmadd_pd(di, fi,
                         _mm256_fmsub_pd(fpr, xr, _mm256_mul_pd(fpi, xi))));
    di = _mm256_fmadd_pd(
        dr, fi,
        _mm256_fmadd_pd(di, fr,
                        _mm256_fmadd_pd(fpr, xi, _mm256_mul_pd(fpi, xr))));
    dr = t;
    t = _mm256_fmsub_pd(xr, fr, _mm256_mul_pd(xi, fi));
    xi = _mm256_fmadd_pd(xr, fi, _mm256_mul_pd(xi, fr));
    xr = t;
  }

  inline void renorm() {
    const __m256d big = _mm256_set1_pd(kBig);
    const __m256d small = _mm256_set1_pd(kSmall);
    const __m256d down = _mm256_set1_pd(kDown);
    const __m256d up = _mm256_set1_pd(kUp);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d e128 = _mm256_set1_pd(128.0);
    __m256d m2 = _mm256_fmadd_pd(
        xr, xr,
        _mm256_fmadd_pd(xi, xi,
                        _mm256_fmadd_pd(dr, dr, _mm256_mul_pd(di, di))));
    __m256d mb = _mm256_cmp_pd(m2, big, _CMP_GT_OQ);
    __m256d ms = _mm256_and_pd(_mm256_cmp_pd(m2, small, _CMP_LT_OQ),
                               _mm256_cmp_pd(m2, _mm256_setzero_pd(),
                                             _CMP_GT_OQ));
    __m256d sc = _mm256_blendv_pd(one, down, mb);
    sc = _mm256_blendv_pd(sc, up, ms);
    xr = _mm256_mul_pd(xr, sc);
    xi = _mm256_mul_pd(xi, sc);
    dr = _mm256_mul_pd(dr, sc);
    di = _mm256_mul_pd(di, sc);
    e = _mm256_add_pd(e, _mm256_and_pd(mb, e128));
    e = _mm256_sub_pd(e, _mm256_and_pd(ms, e128));
  }

  State lane(int i) const {
    alignas(32) double bxr[4], bxi[4], bdr[4], bdi[4], be[4];
    _mm256_store_pd(bxr, xr);
    _mm256_store_pd(bxi, xi);
    _mm256_store_pd(bdr, dr);
    _mm256_store_pd(bdi, di);
    _mm256_store_pd(be, e);
    State s;
    s.xr = bxr[i]; s.xi = bxi[i]; s.dr = bdr[i]; s.di = bdi[i];
    s.e = int(be[i]);
    return s;
  }
};

}  // namespace

void blaschke_batch_avx2(const BlaschkeFactors& f, const double* zr,
                         const double* zi, size_t npts, cplx* val,
                         cplx* dval) {
  const size_t n = f.count();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d mone = _mm256_set1_pd(-1.0);
  const __m256d zero = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= npts; i += 4) {
    const __m256d x = _mm256_loadu_pd(zr + i);
    const __m256d y = _mm256_loadu_pd(zi + i);
    VState a, c;
    a.init();
    c.init();
    for (size_t k = 0; k < n; ++k) {
      const __m256d ar = _mm256_set1_pd(f.re[k]);
      const __m256d ai = _mm256_set1_pd(f.im[k]);
      a.step(_mm256_sub_pd(ar, x), _mm256_sub_pd(ai, y), mone, zero);
      // v = 1 - conj(a) z = (1 - (ar x + ai y), ai x - ar y), v' = (-ar, ai)
      __m256d vr = _mm256_sub_pd(
          one, _mm256_fmadd_pd(ar, x, _mm256_mul_pd(ai, y)));
      __m256d vi = _mm256_fmsub_pd(ai, x, _mm256_mul_pd(ar, y));
      c.step(vr, vi, _mm256_sub_pd(zero, ar), ai);
      if ((k & 7) == 7) {
        a.renorm();
        c.renorm();
      }
    }
    for (int l = 0; l < 4; ++l)
      assemble(a.lane(l), c.lane(l), {1.0, 0.0},
               val ? val + i + l : nullptr, dval ? dval + i + l : nullptr);
  }
  if (i < npts)
    blaschke_batch_scalar(f, zr + i, zi + i, npts - i, val ? val + i : nullptr,
                          dval ? dval + i : nullptr);
}

void rational_batch_avx2(const RationalFactors& f, const double* wr,
                         const double* wi, size_t npts, cplx* val,
                         cplx* dval) {
  const size_t nz = f.zr.size(), np = f.pr.size();
  const size_t m = std::max(nz, np);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= npts; i += 4) {
    const __m256d x = _mm256_loadu_pd(wr + i);
    const __m256d y = _mm256_loadu_pd(wi + i);
    VState a, c;
    a.init();
    c.init();
    for (size_t k = 0; k < m; ++k) {
      if (k < nz)
        a.step(_mm256_sub_pd(x, _mm256_set1_pd(f.zr[k])),
               _mm256_sub_pd(y, _mm256_set1_pd(f.zi[k])), one, zero);
      if (k < np)
        c.step(_mm256_sub_pd(x, _mm256_set1_pd(f.pr[k])),
               _mm256_sub_pd(y, _mm256_set1_pd(f.pi[k])), one, zero);
      if ((k & 7) == 7) {
        a.renorm();
        c.renorm();
      }
    }
    for (int l = 0; l < 4; ++l)
      assemble(a.lane(l), c.lane(l), f.scale, val ? val + i + l : nullptr,
               dval ? dval + i + l : nullptr);
  }
  if (i < npts)
    rational_batch_scalar(f, wr + i, wi + i, npts - i, val ? val + i : nullptr,
                          dval ? dval + i : nullptr);
}

void poly_batch_avx2(std::span<const cplx> coeffs, const double* zr,
                     const double* zi, size_t npts, cplx* val, cplx* dval) {
  const size_t m = coeffs.size();
  if (m == 0) {
    poly_batch_scalar(coeffs, zr, zi, npts, val, dval);
    return;
  }
  size_t i = 0;
  for (; i + 4 <= npts; i += 4) {
    const __m256d x = _mm256_loadu_pd(zr + i);
    const __m256d y = _mm256_loadu_pd(zi + i);
    __m256d vr = _mm256_set1_pd(coeffs[m - 1].real());
    __m256d vi = _mm256_set1_pd(coeffs[m - 1].imag());
    __m256d dr = _mm256_setzero_pd();
    __m256d di = _mm256_setzero_pd();
    for (size_t j = m - 1; j-- > 0;) {
      __m256d t = _mm256_fmadd_pd(dr, x, _mm256_fnmadd_pd(di, y, vr));
      di = _mm256_fmadd_pd(dr, y, _mm256_fmadd_pd(di, x, vi));
      dr = t;
      t = _mm256_fmadd_pd(vr, x,
                          _mm256_fnmadd_pd(vi, y,
                                           _mm256_set1_pd(coeffs[j].real())));
      vi = _mm256_fmadd_pd(vr, y,
                           _mm256_fmadd_pd(vi, x,
                                           _mm256_set1_pd(coeffs[j].imag())));
      vr = t;
    }
    alignas(32) double br[4], bi[4], cr[4], ci[4];
    _mm256_store_pd(br, vr);
    _mm256_store_pd(bi, vi);
    _mm256_store_pd(cr, dr);
    _mm256_store_pd(ci, di);
    for (int l = 0; l < 4; ++l) {
      if (val) val[i + l] = {br[l], bi[l]};
      if (dval) dval[i + l] = {cr[l], ci[l]};
    }
  }
  if (i < npts)
    poly_batch_scalar(coeffs, zr + i, zi + i, npts - i,
                      val ? val + i : nullptr, dval ? dval + i : nullptr);
}

}  // namespace bpl::kernels::detail
