#include "bpl/complexpoly.hpp"

#include <algorithm>
#include <cmath>

#include "bpl/fft.hpp"
#include "bpl/kernels.hpp"

namespace bpl {

ComplexPoly::ComplexPoly(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back({0.0, 0.0});
  while (coeffs_.size() > 1 && coeffs_.back() == cplx{0.0, 0.0})
    coeffs_.pop_back();
}

cplx ComplexPoly::eval(cplx z) const {
  cplx v = coeffs_.back();
  for (size_t j = coeffs_.size() - 1; j-- > 0;) v = v * z + coeffs_[j];
  return v;
}

void ComplexPoly::eval_batch(const double* zr, const double* zi, size_t npts,
                             cplx* val, cplx* dval) const {
  kernels::poly_batch(coeffs_, zr, zi, npts, val, dval,
                      kernels::preferred_variant());
}

void ComplexPoly::circle_values(double r, double offset,
                                std::span<cplx> out) const {
  size_t n = out.size();
  if (n >= 512) {
    fft::poly_circle_eval(coeffs_, r, offset, out);
    return;
  }
  std::vector<double> xs(n), ys(n);
  for (size_t k = 0; k < n; ++k) {
    double t = kTwoPi * double(k) / double(n) + offset;
    xs[k] = r * std::cos(t);
    ys[k] = r * std::sin(t);
  }
  eval_batch(xs.data(), ys.data(), n, out.data(), nullptr);
}

ComplexPoly ComplexPoly::derivative() const {
  if (coeffs_.size() == 1) return ComplexPoly{};
  std::vector<cplx> d(coeffs_.size() - 1);
  for (size_t k = 1; k < coeffs_.size(); ++k)
    d[k - 1] = double(k) * coeffs_[k];
  return ComplexPoly(std::move(d));
}

ComplexPoly ComplexPoly::antiderivative() const {
  std::vector<cplx> a(coeffs_.size() + 1, cplx{0.0, 0.0});
  for (size_t k = 0; k < coeffs_.size(); ++k)
    a[k + 1] = coeffs_[k] / double(k + 1);
  return ComplexPoly(std::move(a));
}

double ComplexPoly::l2_coeff_norm(double r) const {
  double r2 = r * r, w = 1.0;
  long double s = 0.0;
  for (const cplx& c : coeffs_) {
    s += (long double)(abs2(c) * w);
    w *= r2;
  }
  return std::sqrt(double(s));
}

double ComplexPoly::sup_norm_circle(double r, double tol) const {
  if (tol <= 0.0) throw Error("sup_norm_circle: tol must be positive");
  size_t d = coeffs_.size() - 1;
  size_t n = pow2_at_least(std::max<size_t>(64, 16 * (d + 1)));
  if (n > (size_t(1) << 24))
    throw Error("sup_norm_circle: degree exceeds the sampling budget");
  std::vector<cplx> vals(n);
  circle_values(r, 0.0, vals);
  std::vector<double> mag(n);
  for (size_t k = 0; k < n; ++k) mag[k] = std::abs(vals[k]);

  // Top three local maxima of the coarse grid, then golden-section refinement
  // inside each enclosing bracket. The coarse grid resolves every oscillation
  // of a degree-d polynomial, so the global maximum is inside one of them.
  std::vector<size_t> peaks;
  for (size_t k = 0; k < n; ++k) {
    double prev = mag[(k + n - 1) % n], next = mag[(k + 1) % n];
    if (mag[k] >= prev && mag[k] >= next) peaks.push_back(k);
  }
  std::sort(peaks.begin(), peaks.end(),
            [&](size_t a, size_t b) { return mag[a] > mag[b]; });
  if (peaks.size() > 3) peaks.resize(3);

  double best = *std::max_element(mag.begin(), mag.end());
  const double h = kTwoPi / double(n);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  auto g = [&](double t) {
    return std::abs(eval({r * std::cos(t), r * std::sin(t)}));
  };
  for (size_t k : peaks) {
    double lo = h * double(k) - h, hi = h * double(k) + h;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = g(x1), f2 = g(x2);
    for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
      if (f1 < f2) {
        lo = x1; x1 = x2; f1 = f2;
        x2 = lo + gr * (hi - lo); f2 = g(x2);
      } else {
        hi = x2; x2 = x1; f2 = f1;
        x1 = hi - gr * (hi - lo); f1 = g(x1);
      }
    }
    best = std::max({best, f1, f2});
  }
  return best;
}

std::pair<ComplexPoly, ComplexPoly> rudin_shapiro(int m) {
  if (m < 0) throw Error("rudin_shapiro: m must be >= 0");
  if (m > 22) throw Error("rudin_shapiro: m exceeds the coefficient-count cap");
  std::vector<cplx> p{cplx{1.0, 0.0}}, q{cplx{1.0, 0.0}};
  for (int s = 0; s < m; ++s) {
    size_t half = p.size();
    std::vector<cplx> np(2 * half), nq(2 * half);
    for (size_t k = 0; k < half; ++k) {
      np[k] = p[k];
      nq[k] = p[k];
      np[half + k] = q[k];
      nq[half + k] = -q[k];
    }
    p = std::move(np);
    q = std::move(nq);
  }
  return {ComplexPoly(std::move(p)), ComplexPoly(std::move(q))};
}

ComplexPoly truncate(std::span<const cplx> coeffs, int n) {
  if (n < 0) throw Error("truncate: n must be >= 0");
  size_t keep = std::min(coeffs.size(), size_t(n) + 1);
  return ComplexPoly(std::vector<cplx>(coeffs.begin(), coeffs.begin() + keep));
}

}  // namespace bpl
