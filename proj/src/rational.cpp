// Rational function construction, evaluation, and circle grids.

#include "bpl/rational.hpp"

#include <algorithm>
#include <cmath>

#include "bpl/fft.hpp"

namespace bpl {

namespace {

// prod_k (w - roots[k]) expanded by incremental convolution.
std::vector<cplx> poly_from_roots(std::span<const cplx> roots) {
  std::vector<cplx> c{cplx{1.0, 0.0}};
  c.reserve(roots.size() + 1);
  for (const cplx& a : roots) {
    c.push_back(cplx{0.0, 0.0});
    for (size_t k = c.size() - 1; k > 0; --k) c[k] = c[k - 1] - a * c[k];
    c[0] = -a * c[0];
  }
  return c;
}

}  // namespace

RationalFunction::RationalFunction(ComplexPoly num)
    : num_(std::move(num)),
      den_(ComplexPoly({cplx{1.0, 0.0}})),
      dnum_(num_.derivative()),
      dden_(den_.derivative()),
      poles_(std::vector<cplx>{}) {}

RationalFunction::RationalFunction(ComplexPoly num, ComplexPoly den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.degree() == 0 && den_.coeff(0) == cplx{0.0, 0.0})
    throw Error("rational: denominator is identically zero");
  dnum_ = num_.derivative();
  dden_ = den_.derivative();
  if (den_.degree() == 0) poles_ = std::vector<cplx>{};
}

RationalFunction RationalFunction::from_poles_zeros(
    std::span<const cplx> zeros, std::span<const cplx> poles, cplx scale) {
  if (scale == cplx{0.0, 0.0}) throw Error("rational: scale must be nonzero");
  for (size_t i = 0; i < zeros.size(); ++i)
    for (size_t j = 0; j < poles.size(); ++j)
      if (std::abs(zeros[i] - poles[j]) < 1e-12)
        throw Error("rational: zero " + std::to_string(i) + " collides with pole " +
                    std::to_string(j) + "; simplify before constructing");

  RationalFunction r;
  auto nc = poly_from_roots(zeros);
  for (cplx& c : nc) c *= scale;
  r.num_ = ComplexPoly(std::move(nc));
  r.den_ = ComplexPoly(poly_from_roots(poles));
  r.dnum_ = r.num_.derivative();
  r.dden_ = r.den_.derivative();
  r.zeros_ = std::vector<cplx>(zeros.begin(), zeros.end());
  r.poles_ = std::vector<cplx>(poles.begin(), poles.end());
  r.factors_.zr.reserve(zeros.size());
  r.factors_.zi.reserve(zeros.size());
  for (const cplx& z : zeros) {
    r.factors_.zr.push_back(z.real());
    r.factors_.zi.push_back(z.imag());
  }
  r.factors_.pr.reserve(poles.size());
  r.factors_.pi.reserve(poles.size());
  for (const cplx& p : poles) {
    r.factors_.pr.push_back(p.real());
    r.factors_.pi.push_back(p.imag());
  }
  r.factors_.scale = scale;
  r.factored_ = true;
  return r;
}

int RationalFunction::degree() const {
  return std::max(num_.degree(), den_.degree());
}

void RationalFunction::eval_batch(const double* wr, const double* wi,
                                  size_t npts, cplx* val, cplx* dval) const {
  if (factored_) {
    kernels::rational_batch(factors_, wr, wi, npts, val, dval,
                            kernels::preferred_variant());
    return;
  }
  if (den_.degree() == 0) {
    const cplx d0 = den_.coeff(0);
    num_.eval_batch(wr, wi, npts, val, dval);
    for (size_t i = 0; i < npts; ++i) {
      if (val) val[i] /= d0;
      if (dval) dval[i] /= d0;
    }
    return;
  }
  static thread_local std::vector<cplx> nv, dv, ndv, ddv;
  nv.resize(npts);
  dv.resize(npts);
  const bool want_d = dval != nullptr;
  if (want_d) {
    ndv.resize(npts);
    ddv.resize(npts);
  }
  num_.eval_batch(wr, wi, npts, nv.data(), want_d ? ndv.data() : nullptr);
  den_.eval_batch(wr, wi, npts, dv.data(), want_d ? ddv.data() : nullptr);
  for (size_t i = 0; i < npts; ++i) {
    const cplx inv = cplx{1.0, 0.0} / dv[i];
    if (val) val[i] = nv[i] * inv;
    if (dval) dval[i] = (ndv[i] * dv[i] - nv[i] * ddv[i]) * inv * inv;
  }
}

cplx RationalFunction::eval(cplx w) const {
  if (poles_) {
    for (const cplx& p : *poles_)
      if (std::abs(w - p) < 1e-10)
        throw Error("rational: evaluation point within 1e-10 of a pole");
  } else if (std::abs(den_.eval(w)) < 1e-280) {
    throw Error("rational: denominator vanishes at evaluation point");
  }
  const double wr = w.real(), wi = w.imag();
  cplx v;
  eval_batch(&wr, &wi, 1, &v, nullptr);
  return v;
}

cplx RationalFunction::deriv(cplx w) const {
  if (poles_) {
    for (const cplx& p : *poles_)
      if (std::abs(w - p) < 1e-10)
        throw Error("rational: evaluation point within 1e-10 of a pole");
  } else if (std::abs(den_.eval(w)) < 1e-280) {
    throw Error("rational: denominator vanishes at evaluation point");
  }
  const double wr = w.real(), wi = w.imag();
  cplx d;
  eval_batch(&wr, &wi, 1, nullptr, &d);
  return d;
}

void RationalFunction::circle_values(double r, double offset,
                                     std::span<cplx> val,
                                     std::span<cplx> dval) const {
  const size_t n = val.empty() ? dval.size() : val.size();
  if (n == 0) return;
  if (!val.empty() && !dval.empty() && val.size() != dval.size())
    throw Error("rational: circle output spans disagree in size");
  static thread_local std::vector<cplx> nv, dv, ndv, ddv;
  nv.resize(n);
  dv.resize(n);
  fft::poly_circle_eval(num_.coeffs(), r, offset, nv);
  fft::poly_circle_eval(den_.coeffs(), r, offset, dv);
  if (dval.empty()) {
    for (size_t i = 0; i < n; ++i) val[i] = nv[i] / dv[i];
    return;
  }
  ndv.resize(n);
  ddv.resize(n);
  fft::poly_circle_eval(dnum_.coeffs(), r, offset, ndv);
  fft::poly_circle_eval(dden_.coeffs(), r, offset, ddv);
  for (size_t i = 0; i < n; ++i) {
    const cplx inv = cplx{1.0, 0.0} / dv[i];
    if (!val.empty()) val[i] = nv[i] * inv;
    dval[i] = (ndv[i] * dv[i] - nv[i] * ddv[i]) * inv * inv;
  }
}

double RationalFunction::pole_margin() const {
  if (poles_) {
    if (poles_->empty()) return 0.0;
    double m = 1e9;
    for (const cplx& p : *poles_) m = std::min(m, std::abs(p) - 1.0);
    return std::max(m, 0.0);
  }
  // |d_k| ~ C * rho^{-k} for a denominator zero-free in |z| < rho: least
  // squares on log|d_k| over the tail half of the coefficients.
  const auto& c = den_.coeffs();
  const int m = int(c.size()) - 1;
  if (m < 4) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int k = m / 2; k <= m; ++k) {
    const double a = std::abs(c[k]);
    if (a <= 0.0) continue;
    const double x = k, y = std::log(a);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt < 3) return 0.0;
  const double det = cnt * sxx - sx * sx;
  if (det <= 0.0) return 0.0;
  const double slope = (cnt * sxy - sx * sy) / det;
  const double rho = std::exp(-slope);
  return std::clamp(rho - 1.0, 0.0, 8.0);
}

std::vector<cplx> RationalFunction::taylor(int count) const {
  if (count <= 0) return {};
  const auto& n = num_.coeffs();
  const auto& d = den_.coeffs();
  if (std::abs(d[0]) < 1e-280)
    throw Error("rational: denominator vanishes at 0; no Taylor expansion");
  const std::complex<long double> d0inv =
      1.0L / std::complex<long double>(d[0].real(), d[0].imag());
  std::vector<std::complex<long double>> c(static_cast<size_t>(count));
  for (size_t i = 0; i < size_t(count); ++i) {
    std::complex<long double> acc =
        i < n.size() ? std::complex<long double>(n[i].real(), n[i].imag())
                     : std::complex<long double>(0.0L, 0.0L);
    const size_t jmax = std::min(i, d.size() - 1);
    for (size_t j = 1; j <= jmax; ++j)
      acc -= std::complex<long double>(d[j].real(), d[j].imag()) * c[i - j];
    c[i] = acc * d0inv;
  }
  std::vector<cplx> out(static_cast<size_t>(count));
  for (size_t i = 0; i < c.size(); ++i)
    out[i] = cplx{double(c[i].real()), double(c[i].imag())};
  return out;
}

namespace {

quad::CircleFn rational_grid_fn(const RationalFunction* r, bool want_deriv) {
  quad::CircleFn f;
  f.eval = [r, want_deriv](double rad, size_t, bool, size_t, size_t count,
                           const double* cs, const double* sn, cplx* out) {
    static thread_local std::vector<double> xr, xi;
    xr.resize(count);
    xi.resize(count);
    for (size_t i = 0; i < count; ++i) {
      xr[i] = rad * cs[i];
      xi[i] = rad * sn[i];
    }
    r->eval_batch(xr.data(), xi.data(), count, want_deriv ? nullptr : out,
                  want_deriv ? out : nullptr);
  };
  f.full_eval = [r, want_deriv](double rad, size_t n, bool half, cplx* out) {
    const double offset = half ? kPi / double(n) : 0.0;
    std::span<cplx> o(out, n);
    if (want_deriv)
      r->circle_values(rad, offset, {}, o);
    else
      r->circle_values(rad, offset, o, {});
  };
  f.hint_degree = double(r->degree());
  f.spectral_scale = r->pole_margin();
  const auto& poles = r->poles();
  if (poles) {
    bool clear = true;
    for (const cplx& p : *poles) clear = clear && std::abs(p) > 1.0 + 1e-9;
    f.boundary_ok = clear;
  } else {
    f.boundary_ok = f.spectral_scale > 1e-6;
  }
  return f;
}

}  // namespace

quad::CircleFn rational_fn(const RationalFunction& r) {
  return rational_grid_fn(&r, false);
}

quad::CircleFn rational_deriv_fn(const RationalFunction& r) {
  return rational_grid_fn(&r, true);
}

}  // namespace bpl
