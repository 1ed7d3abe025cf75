#include "bpl/blaschke.hpp"

#include <cmath>
#include <string>

#include "bpl/fft.hpp"

namespace bpl {
namespace {

cplx ipow(cplx z, int m) {
  cplx r{1.0, 0.0};
  while (m > 0) {
    if (m & 1) r *= z;
    z *= z;
    m >>= 1;
  }
  return r;
}

}  // namespace

BlaschkeProduct::BlaschkeProduct(std::vector<cplx> zeros, cplx front)
    : zeros_(std::move(zeros)), front_(front) {
  if (std::abs(std::abs(front_) - 1.0) > 1e-12)
    throw Error("BlaschkeProduct: front factor must be unimodular");
  for (size_t k = 0; k < zeros_.size(); ++k) {
    double r = std::abs(zeros_[k]);
    if (r > 1.0 - 1e-12)
      throw Error("BlaschkeProduct: zero " + std::to_string(k) +
                  " too close to the unit circle");
    max_radius_ = std::max(max_radius_, r);
    if (zeros_[k] == cplx{0.0, 0.0}) {
      ++origin_count_;
    } else {
      fac_.re.push_back(zeros_[k].real());
      fac_.im.push_back(zeros_[k].imag());
    }
  }
}

void BlaschkeProduct::eval_batch(const double* zr, const double* zi,
                                 size_t npts, cplx* val, cplx* dval) const {
  const bool compose = origin_count_ > 0 || front_ != cplx{1.0, 0.0};
  // The composition below needs the factor-product values U even when the
  // caller asked only for derivatives.
  cplx* uval = val;
  static thread_local std::vector<cplx> scratch;
  if (compose && dval != nullptr && val == nullptr) {
    scratch.resize(npts);
    uval = scratch.data();
  }
  kernels::blaschke_batch(fac_, zr, zi, npts, uval, dval,
                          kernels::preferred_variant());
  if (!compose) return;
  for (size_t i = 0; i < npts; ++i) {
    cplx z{zr[i], zi[i]};
    cplx u = uval ? uval[i] : cplx{};
    if (origin_count_ == 0) {
      if (val) val[i] = front_ * u;
      if (dval) dval[i] = front_ * dval[i];
      continue;
    }
    // B = front * z^m * U, B' = front * (m z^{m-1} U + z^m U').
    cplx zm1 = ipow(z, origin_count_ - 1);
    cplx zm = zm1 * z;
    if (dval)
      dval[i] = front_ * (double(origin_count_) * zm1 * u + zm * dval[i]);
    if (val) val[i] = front_ * zm * u;
  }
}

cplx BlaschkeProduct::eval(cplx z) const {
  double x = z.real(), y = z.imag();
  cplx v;
  eval_batch(&x, &y, 1, &v, nullptr);
  return v;
}

cplx BlaschkeProduct::deriv(cplx z) const {
  double x = z.real(), y = z.imag();
  cplx d;
  eval_batch(&x, &y, 1, nullptr, &d);
  return d;
}

std::vector<cplx> BlaschkeProduct::taylor_coeffs(int m) const {
  if (m < 0) throw Error("taylor_coeffs: m must be >= 0");
  return fft::taylor_via_circle(
      [this](double r, size_t n, std::span<cplx> out) {
        std::vector<double> xs(n), ys(n);
        for (size_t k = 0; k < n; ++k) {
          double t = kTwoPi * double(k) / double(n);
          xs[k] = r * std::cos(t);
          ys[k] = r * std::sin(t);
        }
        eval_batch(xs.data(), ys.data(), n, out.data(), nullptr);
      },
      m);
}

double bloch_seminorm(const std::function<cplx(cplx)>& fprime,
                      std::span<const double> r_grid, int angle_count) {
  double best = 0.0;
  for (double r : r_grid) {
    double w = 1.0 - r * r;
    for (int k = 0; k < angle_count; ++k) {
      double t = kTwoPi * double(k) / double(angle_count);
      cplx z{r * std::cos(t), r * std::sin(t)};
      best = std::max(best, w * std::abs(fprime(z)));
    }
  }
  return best;
}

}  // namespace bpl
