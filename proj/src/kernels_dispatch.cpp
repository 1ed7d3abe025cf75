#include <cstdlib>
#include <cstring>

#include "bpl/kernels.hpp"

namespace bpl::kernels {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Variant preferred_variant() {
  static const Variant v = [] {
    if (const char* env = std::getenv("BPLAB_KERNEL")) {
      if (std::strcmp(env, "scalar") == 0) return Variant::scalar;
      if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2())
        return Variant::avx2;
    }
    return cpu_has_avx2() ? Variant::avx2 : Variant::scalar;
  }();
  return v;
}

void blaschke_batch(const BlaschkeFactors& f, const double* zr,
                    const double* zi, size_t npts, cplx* val, cplx* dval,
                    Variant variant) {
  if (variant == Variant::avx2 && cpu_has_avx2())
    detail::blaschke_batch_avx2(f, zr, zi, npts, val, dval);
  else
    detail::blaschke_batch_scalar(f, zr, zi, npts, val, dval);
}

void rational_batch(const RationalFactors& f, const double* wr,
                    const double* wi, size_t npts, cplx* val, cplx* dval,
                    Variant variant) {
  if (variant == Variant::avx2 && cpu_has_avx2())
    detail::rational_batch_avx2(f, wr, wi, npts, val, dval);
  else
    detail::rational_batch_scalar(f, wr, wi, npts, val, dval);
}

void poly_batch(std::span<const cplx> coeffs, const double* zr,
                const double* zi, size_t npts, cplx* val, cplx* dval,
                Variant variant) {
  if (variant == Variant::avx2 && cpu_has_avx2())
    detail::poly_batch_avx2(coeffs, zr, zi, npts, val, dval);
  else
    detail::poly_batch_scalar(coeffs, zr, zi, npts, val, dval);
}

}  // namespace bpl::kernels
