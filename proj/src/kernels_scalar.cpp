#include "kernels_common.hpp"

// Scalar reference kernels. The AVX2 variants mirror this code; any change
// here must be replicated there (equivalence tests compare the two).

namespace bpl::kernels::detail {

void blaschke_batch_scalar(const BlaschkeFactors& f, const double* zr,
                           const double* zi, size_t npts, cplx* val,
                           cplx* dval) {
  const size_t n = f.count();
  for (size_t i = 0; i < npts; ++i) {
    const double x = zr[i], y = zi[i];
    State a, c;
    for (size_t k = 0; k < n; ++k) {
      const double ar = f.re[k], ai = f.im[k];
      // numerator factor u = a - z, u' = -1
      a.step(ar - x, ai - y, -1.0, 0.0);
      // denominator factor v = 1 - conj(a) z, v' = -conj(a)
      c.step(1.0 - (ar * x + ai * y), ai * x - ar * y, -ar, ai);
      if ((k & 7) == 7) {
        a.renorm();
        c.renorm();
      }
    }
    assemble(a, c, {1.0, 0.0}, val ? val + i : nullptr,
             dval ? dval + i : nullptr);
  }
}

void rational_batch_scalar(const RationalFactors& f, const double* wr,
                           const double* wi, size_t npts, cplx* val,
                           cplx* dval) {
  const size_t nz = f.zr.size(), np = f.pr.size();
  const size_t m = std::max(nz, np);
  for (size_t i = 0; i < npts; ++i) {
    const double x = wr[i], y = wi[i];
    State a, c;
    for (size_t k = 0; k < m; ++k) {
      if (k < nz) a.step(x - f.zr[k], y - f.zi[k], 1.0, 0.0);
      if (k < np) c.step(x - f.pr[k], y - f.pi[k], 1.0, 0.0);
      if ((k & 7) == 7) {
        a.renorm();
        c.renorm();
      }
    }
    assemble(a, c, f.scale, val ? val + i : nullptr, dval ? dval + i : nullptr);
  }
}

void poly_batch_scalar(std::span<const cplx> coeffs, const double* zr,
                       const double* zi, size_t npts, cplx* val, cplx* dval) {
  const size_t m = coeffs.size();
  if (m == 0) {
    for (size_t i = 0; i < npts; ++i) {
      if (val) val[i] = 0.0;
      if (dval) dval[i] = 0.0;
    }
    return;
  }
  for (size_t i = 0; i < npts; ++i) {
    const double x = zr[i], y = zi[i];
    double vr = coeffs[m - 1].real(), vi = coeffs[m - 1].imag();
    double dr = 0.0, di = 0.0;
    for (size_t j = m - 1; j-- > 0;) {
      double t = dr * x - di * y + vr;
      di = dr * y + di * x + vi;
      dr = t;
      t = vr * x - vi * y + coeffs[j].real();
      vi = vr * y + vi * x + coeffs[j].imag();
      vr = t;
    }
    if (val) val[i] = {vr, vi};
    if (dval) dval[i] = {dr, di};
  }
}

}  // namespace bpl::kernels::detail
