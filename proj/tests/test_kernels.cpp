// Batch-evaluation kernels: scalar variants against straightforward complex
// arithmetic, AVX2 variants against the scalar reference, tail handling, and
// the large-degree renormalization path.
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "bpl/kernels.hpp"
#include "bpl/rng.hpp"
#include "bpl/util.hpp"

using namespace bpl;
using kernels::BlaschkeFactors;
using kernels::RationalFactors;
using kernels::Variant;

namespace {

// Plain product-rule evaluation of prod_k (a_k - z)/(1 - conj(a_k) z).
void blaschke_naive(const BlaschkeFactors& f, cplx z, cplx& val, cplx& dval) {
  cplx p{1.0, 0.0}, d{0.0, 0.0};
  for (size_t k = 0; k < f.count(); ++k) {
    const cplx a{f.re[k], f.im[k]};
    const cplx den = 1.0 - std::conj(a) * z;
    const cplx fk = (a - z) / den;
    const cplx dfk = (abs2(a) - 1.0) / (den * den);
    d = d * fk + p * dfk;
    p = p * fk;
  }
  val = p;
  dval = d;
}

void rational_naive(const RationalFactors& f, cplx w, cplx& val, cplx& dval) {
  cplx num{1.0, 0.0}, dnum{0.0, 0.0};
  for (size_t k = 0; k < f.zr.size(); ++k) {
    const cplx fk = w - cplx{f.zr[k], f.zi[k]};
    dnum = dnum * fk + num;
    num = num * fk;
  }
  cplx den{1.0, 0.0}, dden{0.0, 0.0};
  for (size_t k = 0; k < f.pr.size(); ++k) {
    const cplx fk = w - cplx{f.pr[k], f.pi[k]};
    dden = dden * fk + den;
    den = den * fk;
  }
  val = f.scale * num / den;
  dval = f.scale * (dnum * den - num * dden) / (den * den);
}

cplx horner(std::span<const cplx> c, cplx z) {
  cplx acc{0.0, 0.0};
  for (size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
  return acc;
}

struct PointSet {
  std::vector<double> re, im;
  size_t size() const { return re.size(); }
};

PointSet disk_points(size_t n, double rmax, uint64_t seed) {
  PointSet pts;
  RngStream rng = RngStream::from(seed, 0);
  for (size_t i = 0; i < n; ++i) {
    const cplx z = std::polar(std::sqrt(rng.uniform()) * rmax, rng.angle());
    pts.re.push_back(z.real());
    pts.im.push_back(z.imag());
  }
  return pts;
}

double rel_err(cplx got, cplx want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

TEST_CASE("blaschke kernel matches naive product evaluation") {
  BlaschkeFactors f;
  RngStream rng = RngStream::from(21, 0);
  for (int k = 0; k < 23; ++k) {
    const cplx a = std::polar(std::sqrt(rng.uniform()) * 0.97, rng.angle());
    f.re.push_back(a.real());
    f.im.push_back(a.imag());
  }
  const PointSet pts = disk_points(97, 0.999, 3);
  std::vector<cplx> val(pts.size()), dval(pts.size());
  kernels::blaschke_batch(f, pts.re.data(), pts.im.data(), pts.size(),
                          val.data(), dval.data(), Variant::scalar);
  for (size_t i = 0; i < pts.size(); ++i) {
    cplx v, d;
    blaschke_naive(f, {pts.re[i], pts.im[i]}, v, d);
    CHECK(rel_err(val[i], v) < 1e-12);
    CHECK(rel_err(dval[i], d) < 1e-11);
  }
}

TEST_CASE("blaschke kernel handles null outputs and empty inputs") {
  BlaschkeFactors f;
  f.re = {0.5};
  f.im = {0.0};
  const PointSet pts = disk_points(5, 0.9, 4);
  std::vector<cplx> val(pts.size()), dval(pts.size());
  kernels::blaschke_batch(f, pts.re.data(), pts.im.data(), pts.size(),
                          val.data(), nullptr, Variant::scalar);
  kernels::blaschke_batch(f, pts.re.data(), pts.im.data(), pts.size(), nullptr,
                          dval.data(), Variant::scalar);
  for (size_t i = 0; i < pts.size(); ++i) {
    cplx v, d;
    blaschke_naive(f, {pts.re[i], pts.im[i]}, v, d);
    CHECK(rel_err(val[i], v) < 1e-13);
    CHECK(rel_err(dval[i], d) < 1e-13);
  }
  // Zero factors: the empty product.
  BlaschkeFactors none;
  cplx v0, d0;
  double zr = 0.3, zi = -0.2;
  kernels::blaschke_batch(none, &zr, &zi, 1, &v0, &d0, Variant::scalar);
  CHECK(v0 == cplx{1.0, 0.0});
  CHECK(d0 == cplx{0.0, 0.0});
  // Zero points: no-op.
  kernels::blaschke_batch(f, nullptr, nullptr, 0, nullptr, nullptr,
                          Variant::scalar);
}

TEST_CASE("blaschke kernel stays renormalized at large degree") {
  BlaschkeFactors f;
  RngStream rng = RngStream::from(77, 1);
  for (int k = 0; k < 4000; ++k) {
    const cplx a = std::polar(0.2 + 0.7 * rng.uniform(), rng.angle());
    f.re.push_back(a.real());
    f.im.push_back(a.imag());
  }
  const PointSet pts = disk_points(17, 0.999, 5);
  std::vector<cplx> val(pts.size()), dval(pts.size());
  kernels::blaschke_batch(f, pts.re.data(), pts.im.data(), pts.size(),
                          val.data(), dval.data(), Variant::scalar);
  for (size_t i = 0; i < pts.size(); ++i) {
    CHECK(std::isfinite(val[i].real()));
    CHECK(std::isfinite(dval[i].real()));
    // A product of disk automorphism factors stays inside the closed disk.
    CHECK(std::abs(val[i]) <= 1.0 + 1e-9);
  }
}

TEST_CASE("rational kernel matches naive factored evaluation") {
  RationalFactors f;
  RngStream rng = RngStream::from(33, 0);
  for (int k = 0; k < 9; ++k) {
    const cplx z = std::polar(0.8, rng.angle());
    f.zr.push_back(z.real());
    f.zi.push_back(z.imag());
  }
  for (int k = 0; k < 7; ++k) {
    const cplx p = std::polar(1.5 + rng.uniform(), rng.angle());
    f.pr.push_back(p.real());
    f.pi.push_back(p.imag());
  }
  f.scale = {0.7, 0.3};
  const PointSet pts = disk_points(61, 1.0, 6);
  std::vector<cplx> val(pts.size()), dval(pts.size());
  kernels::rational_batch(f, pts.re.data(), pts.im.data(), pts.size(),
                          val.data(), dval.data(), Variant::scalar);
  for (size_t i = 0; i < pts.size(); ++i) {
    cplx v, d;
    rational_naive(f, {pts.re[i], pts.im[i]}, v, d);
    CHECK(rel_err(val[i], v) < 1e-12);
    CHECK(rel_err(dval[i], d) < 1e-11);
  }
}

TEST_CASE("poly kernel matches Horner and the derivative rule") {
  RngStream rng = RngStream::from(55, 0);
  std::vector<cplx> coeffs;
  for (int k = 0; k <= 40; ++k)
    coeffs.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
  std::vector<cplx> dcoeffs;
  for (size_t k = 1; k < coeffs.size(); ++k)
    dcoeffs.push_back(double(k) * coeffs[k]);

  const PointSet pts = disk_points(33, 1.0, 7);
  std::vector<cplx> val(pts.size()), dval(pts.size());
  kernels::poly_batch(coeffs, pts.re.data(), pts.im.data(), pts.size(),
                      val.data(), dval.data(), Variant::scalar);
  for (size_t i = 0; i < pts.size(); ++i) {
    const cplx z{pts.re[i], pts.im[i]};
    CHECK(rel_err(val[i], horner(coeffs, z)) < 1e-13);
    CHECK(rel_err(dval[i], horner(dcoeffs, z)) < 1e-12);
  }
  // Constant polynomial: derivative identically 0.
  std::vector<cplx> c1{{2.0, -1.0}};
  cplx v, d;
  double zr = 0.4, zi = 0.1;
  kernels::poly_batch(c1, &zr, &zi, 1, &v, &d, Variant::scalar);
  CHECK(v == c1[0]);
  CHECK(d == cplx{0.0, 0.0});
}

TEST_CASE("avx2 variants agree with the scalar reference") {
  if (!kernels::cpu_has_avx2()) {
    MESSAGE("AVX2 not available on this host; equivalence pair skipped");
    return;
  }
  // Sizes around the vector width exercise the masked tails.
  for (size_t npts : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 31u, 64u, 257u}) {
    const PointSet pts = disk_points(npts, 0.999, 100 + npts);

    BlaschkeFactors bf;
    RngStream rng = RngStream::from(200, npts);
    for (int k = 0; k < 17; ++k) {
      const cplx a = std::polar(std::sqrt(rng.uniform()) * 0.95, rng.angle());
      bf.re.push_back(a.real());
      bf.im.push_back(a.imag());
    }
    std::vector<cplx> vs(npts), ds(npts), va(npts), da(npts);
    kernels::blaschke_batch(bf, pts.re.data(), pts.im.data(), npts, vs.data(),
                            ds.data(), Variant::scalar);
    kernels::blaschke_batch(bf, pts.re.data(), pts.im.data(), npts, va.data(),
                            da.data(), Variant::avx2);
    for (size_t i = 0; i < npts; ++i) {
      CHECK(rel_err(va[i], vs[i]) < 1e-12);
      CHECK(rel_err(da[i], ds[i]) < 1e-11);
    }

    RationalFactors rf;
    for (int k = 0; k < 6; ++k) {
      const cplx z = std::polar(0.85, rng.angle());
      rf.zr.push_back(z.real());
      rf.zi.push_back(z.imag());
      const cplx p = std::polar(1.4 + rng.uniform(), rng.angle());
      rf.pr.push_back(p.real());
      rf.pi.push_back(p.imag());
    }
    rf.scale = {1.1, -0.4};
    kernels::rational_batch(rf, pts.re.data(), pts.im.data(), npts, vs.data(),
                            ds.data(), Variant::scalar);
    kernels::rational_batch(rf, pts.re.data(), pts.im.data(), npts, va.data(),
                            da.data(), Variant::avx2);
    for (size_t i = 0; i < npts; ++i) {
      CHECK(rel_err(va[i], vs[i]) < 1e-12);
      CHECK(rel_err(da[i], ds[i]) < 1e-11);
    }

    std::vector<cplx> coeffs;
    for (int k = 0; k <= 25; ++k)
      coeffs.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    kernels::poly_batch(coeffs, pts.re.data(), pts.im.data(), npts, vs.data(),
                        ds.data(), Variant::scalar);
    kernels::poly_batch(coeffs, pts.re.data(), pts.im.data(), npts, va.data(),
                        da.data(), Variant::avx2);
    for (size_t i = 0; i < npts; ++i) {
      CHECK(rel_err(va[i], vs[i]) < 1e-12);
      CHECK(rel_err(da[i], ds[i]) < 1e-12);
    }
  }
}

TEST_CASE("preferred variant is consistent with the cpu probe") {
  const Variant v = kernels::preferred_variant();
  if (!kernels::cpu_has_avx2()) CHECK(v == Variant::scalar);
  // Requesting avx2 on a host without it silently runs the scalar path; the
  // dispatch entry points must accept either tag regardless.
  BlaschkeFactors f;
  f.re = {0.3};
  f.im = {0.1};
  double zr = 0.2, zi = 0.2;
  cplx out_s, out_a;
  kernels::blaschke_batch(f, &zr, &zi, 1, &out_s, nullptr, Variant::scalar);
  kernels::blaschke_batch(f, &zr, &zi, 1, &out_a, nullptr, Variant::avx2);
  CHECK(std::abs(out_s - out_a) < 1e-13);
}
