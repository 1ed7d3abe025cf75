// Dense polynomials: evaluation paths, circle norms, the Rudin-Shapiro pair,
// and series truncation.
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "bpl/complexpoly.hpp"
#include "bpl/rng.hpp"
#include "bpl/util.hpp"

using namespace bpl;

TEST_CASE("construction strips trailing zeros but keeps the zero polynomial") {
  ComplexPoly z0;
  CHECK(z0.degree() == 0);
  CHECK(z0.coeff(0) == cplx{0.0, 0.0});

  ComplexPoly p(std::vector<cplx>{{1.0, 0.0}, {2.0, 0.0}, {0.0, 0.0},
                                  {0.0, 0.0}});
  CHECK(p.degree() == 1);
  CHECK(p.coeffs().size() == 2);
  CHECK(p.coeff(7) == cplx{0.0, 0.0});

  ComplexPoly allz(std::vector<cplx>{{0.0, 0.0}, {0.0, 0.0}});
  CHECK(allz.degree() == 0);
}

TEST_CASE("eval agrees with the closed form") {
  ComplexPoly p(std::vector<cplx>{{1.0, 0.0}, {2.0, 0.0}, {3.0, 0.0}});
  CHECK(std::abs(p.eval({2.0, 0.0}) - cplx{17.0, 0.0}) < 1e-14);
  const cplx z{0.3, -0.4};
  CHECK(std::abs(p.eval(z) - (1.0 + 2.0 * z + 3.0 * z * z)) < 1e-14);
}

TEST_CASE("derivative and antiderivative invert each other") {
  RngStream rng = RngStream::from(17, 0);
  std::vector<cplx> c;
  for (int k = 0; k <= 12; ++k)
    c.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
  ComplexPoly p(c);
  ComplexPoly back = p.derivative().antiderivative();
  // Antiderivative pins the constant term at 0; the rest must return exactly.
  CHECK(back.coeff(0) == cplx{0.0, 0.0});
  for (int k = 1; k <= p.degree(); ++k)
    CHECK(std::abs(back.coeff(size_t(k)) - p.coeff(size_t(k))) < 1e-15);
  CHECK(ComplexPoly().derivative().degree() == 0);
}

TEST_CASE("l2 coefficient norm matches the sum") {
  ComplexPoly p(std::vector<cplx>{{1.0, 0.0}, {1.0, 0.0}});
  CHECK(std::abs(p.l2_coeff_norm(1.0) - std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(p.l2_coeff_norm(0.5) - std::sqrt(1.25)) < 1e-15);
  ComplexPoly q(std::vector<cplx>{{0.0, 0.0}, {0.0, 3.0}});
  CHECK(std::abs(q.l2_coeff_norm(0.5) - 1.5) < 1e-15);
}

TEST_CASE("sup norm on circles is certified from below") {
  // Monomial: |z^5| = r^5 everywhere on the circle.
  ComplexPoly mono(std::vector<cplx>{{0, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0},
                                     {1.0, 0.0}});
  for (double r : {0.5, 0.9, 1.0}) {
    const double s = mono.sup_norm_circle(r, 1e-9);
    const double want = std::pow(r, 5.0);
    CHECK(s <= want * (1.0 + 1e-12));
    CHECK(s >= want * (1.0 - 1e-9));
  }
  // 1 + z peaks at z = r on the positive axis.
  ComplexPoly p(std::vector<cplx>{{1.0, 0.0}, {1.0, 0.0}});
  const double s = p.sup_norm_circle(1.0, 1e-10);
  CHECK(s <= 2.0 + 1e-12);
  CHECK(s >= 2.0 * (1.0 - 1e-10));
  // Random polynomial: certified value dominates a dense sample scan.
  RngStream rng = RngStream::from(23, 0);
  std::vector<cplx> c;
  for (int k = 0; k <= 20; ++k)
    c.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
  ComplexPoly q(c);
  const double sup = q.sup_norm_circle(1.0, 1e-8);
  double scan = 0.0;
  for (int j = 0; j < 4096; ++j)
    scan = std::max(scan, std::abs(q.eval(std::polar(1.0, kTwoPi * j / 4096.0))));
  CHECK(sup >= scan * (1.0 - 1e-8) - 1e-12);
  CHECK(sup <= scan * (1.0 + 1e-6) + 1e-12);
}

TEST_CASE("batch evaluation matches pointwise evaluation") {
  RngStream rng = RngStream::from(29, 0);
  std::vector<cplx> c;
  for (int k = 0; k <= 15; ++k)
    c.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
  ComplexPoly p(c);
  ComplexPoly dp = p.derivative();
  std::vector<double> zr, zi;
  for (int i = 0; i < 37; ++i) {
    const cplx z = std::polar(rng.uniform(), rng.angle());
    zr.push_back(z.real());
    zi.push_back(z.imag());
  }
  std::vector<cplx> val(zr.size()), dval(zr.size());
  p.eval_batch(zr.data(), zi.data(), zr.size(), val.data(), dval.data());
  for (size_t i = 0; i < zr.size(); ++i) {
    const cplx z{zr[i], zi[i]};
    CHECK(std::abs(val[i] - p.eval(z)) < 1e-13);
    CHECK(std::abs(dval[i] - dp.eval(z)) < 1e-12);
  }
}

TEST_CASE("circle values agree with Horner on both grid sizes") {
  RngStream rng = RngStream::from(41, 0);
  std::vector<cplx> c;
  for (int k = 0; k <= 31; ++k)
    c.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
  ComplexPoly p(c);
  for (size_t n : {size_t{8}, size_t{1024}}) {
    for (double offset : {0.0, 0.37}) {
      std::vector<cplx> out(n);
      p.circle_values(0.9, offset, out);
      for (size_t j = 0; j < n; j += (n > 64 ? 97 : 1)) {
        const cplx z = std::polar(0.9, kTwoPi * double(j) / double(n) + offset);
        CHECK(std::abs(out[j] - p.eval(z)) < 1e-11);
      }
    }
  }
}

TEST_CASE("rudin-shapiro pair satisfies the defining recursion") {
  auto [p0, q0] = rudin_shapiro(0);
  CHECK(p0.degree() == 0);
  CHECK(p0.coeff(0) == cplx{1.0, 0.0});
  CHECK(q0.coeff(0) == cplx{1.0, 0.0});

  for (int m = 1; m <= 8; ++m) {
    auto [pm, qm] = rudin_shapiro(m);
    auto [pp, qp] = rudin_shapiro(m - 1);
    const size_t half = size_t{1} << (m - 1);
    CHECK(pm.coeffs().size() == 2 * half);
    for (size_t k = 0; k < half; ++k) {
      CHECK(pm.coeff(k) == pp.coeff(k));
      CHECK(pm.coeff(half + k) == qp.coeff(k));
      CHECK(qm.coeff(k) == pp.coeff(k));
      CHECK(qm.coeff(half + k) == -qp.coeff(k));
    }
    // Plus-minus-one coefficients throughout.
    for (const auto& a : pm.coeffs()) {
      CHECK(a.imag() == 0.0);
      CHECK(std::abs(std::abs(a.real()) - 1.0) == 0.0);
    }
  }
}

TEST_CASE("rudin-shapiro pair is flat on the circle") {
  for (int m : {3, 6, 10}) {
    auto [p, q] = rudin_shapiro(m);
    const double target = std::pow(2.0, double(m + 1));
    for (int j = 0; j < 64; ++j) {
      const cplx z = std::polar(1.0, kTwoPi * double(j) / 64.0 + 0.1);
      const double s = abs2(p.eval(z)) + abs2(q.eval(z));
      CHECK(std::abs(s - target) < 1e-9 * target);
    }
    const double sup = p.sup_norm_circle(1.0, 1e-6);
    CHECK(sup <= std::pow(2.0, 0.5 * double(m + 1)) * (1.0 + 1e-9));
  }
}

TEST_CASE("rudin-shapiro rejects oversized orders") {
  CHECK_THROWS_AS(rudin_shapiro(23), Error);
  CHECK_THROWS_AS(rudin_shapiro(-1), Error);
}

TEST_CASE("truncate keeps exactly the first coefficients") {
  std::vector<cplx> c{{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}};
  ComplexPoly t = truncate(c, 2);
  CHECK(t.degree() == 2);
  CHECK(t.coeff(2) == cplx{3.0, 0.0});
  CHECK(t.coeff(3) == cplx{0.0, 0.0});
  // Truncation order beyond the series keeps everything.
  ComplexPoly all = truncate(c, 10);
  CHECK(all.degree() == 4);
}
