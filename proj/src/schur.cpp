// Schur parameter extraction and Blaschke synthesis.

#include "bpl/schur.hpp"

#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace bpl {

namespace {

using lcplx = std::complex<long double>;

lcplx widen(cplx z) { return lcplx{z.real(), z.imag()}; }
cplx narrow(lcplx z) { return cplx{double(z.real()), double(z.imag())}; }

}  // namespace

SchurAnalysis schur_parameters(std::span<const cplx> coeffs) {
  SchurAnalysis res;
  const size_t m = coeffs.size();
  if (m == 0) return res;
  res.params.gammas.reserve(m);

  std::vector<lcplx> a(m), b(m, lcplx{0.0L, 0.0L}), na, nb;
  for (size_t i = 0; i < m; ++i) a[i] = widen(coeffs[i]);
  b[0] = lcplx{1.0L, 0.0L};

  for (size_t j = 0; j < m; ++j) {
    const size_t len = m - j;
    const lcplx g = a[0];  // b[0] == 1 by the renormalization below
    const long double mag = std::abs(g);
    if (mag > 1.0L + 1e-8L)
      throw Error("schur: not a Schur-class coefficient sequence (parameter " +
                  std::to_string(j) + " has modulus " +
                  std::to_string(double(mag)) + ")");
    if (mag >= 1.0L - 1e-10L) {
      // The iterate is numerically a unimodular constant: the input is a
      // Blaschke product of degree j and the parameter list is complete.
      res.early_termination = true;
      res.termination_step = int(j);
      res.params.tail_phase = narrow(g / mag);
      return res;
    }
    res.params.gammas.push_back(narrow(g));
    if (len == 1) break;

    const lcplx gc = std::conj(g);
    na.assign(len - 1, lcplx{});
    nb.assign(len - 1, lcplx{});
    for (size_t i = 0; i + 1 < len; ++i) {
      na[i] = a[i + 1] - g * b[i + 1];
      nb[i] = b[i] - gc * a[i];
    }
    // nb[0] = 1 - |g|^2 exactly; renormalize so the next parameter is
    // read off as a[0] directly and the pair stays well-scaled.
    const long double scale = 1.0L / nb[0].real();
    for (size_t i = 0; i + 1 < len; ++i) {
      na[i] *= scale;
      nb[i] *= scale;
    }
    nb[0] = lcplx{1.0L, 0.0L};
    a.swap(na);
    b.swap(nb);
  }
  return res;
}

RationalFunction reconstruct(const SchurParameters& params) {
  const double tmag = std::abs(params.tail_phase);
  if (std::abs(tmag - 1.0) > 1e-12)
    throw Error("schur: tail phase must be unimodular (|tail| = " +
                std::to_string(tmag) + ")");
  const size_t m = params.gammas.size();
  for (size_t j = 0; j < m; ++j)
    if (std::abs(params.gammas[j]) > 1.0 - 1e-10)
      throw Error("schur: interior parameter " + std::to_string(j) +
                  " is not strictly inside the disk");

  // f = num/den, processed tail-first; one forward step prepends gamma_j:
  //   num <- gamma_j * den + z * num,  den <- den + conj(gamma_j) * z * num.
  std::vector<lcplx> num{widen(params.tail_phase)}, den{lcplx{1.0L, 0.0L}};
  num.reserve(m + 1);
  den.reserve(m + 1);
  for (size_t j = m; j-- > 0;) {
    const lcplx g = widen(params.gammas[j]);
    const lcplx gc = std::conj(g);
    const size_t len = num.size();
    num.push_back(lcplx{});
    den.push_back(lcplx{});
    for (size_t i = len; i > 0; --i) {
      const lcplx shifted = num[i - 1];
      num[i] = g * den[i] + shifted;
      den[i] = den[i] + gc * shifted;
    }
    num[0] = g * den[0];
  }

  std::vector<cplx> nd(num.size()), dd(den.size());
  for (size_t i = 0; i < num.size(); ++i) nd[i] = narrow(num[i]);
  for (size_t i = 0; i < den.size(); ++i) dd[i] = narrow(den[i]);
  return RationalFunction(ComplexPoly(std::move(nd)), ComplexPoly(std::move(dd)));
}

RationalFunction blaschke_from_taylor(std::span<const cplx> coeffs,
                                      cplx tail_phase) {
  SchurAnalysis an = schur_parameters(coeffs);
  if (!an.early_termination) an.params.tail_phase = tail_phase;
  RationalFunction b = reconstruct(an.params);

  const auto back = b.taylor(int(coeffs.size()));
  for (size_t i = 0; i < coeffs.size(); ++i) {
    if (std::abs(back[i] - coeffs[i]) > 1e-9)
      throw Error("schur: synthesized product misses coefficient " +
                  std::to_string(i) + " by " +
                  std::to_string(std::abs(back[i] - coeffs[i])) +
                  " (precision exhausted at this order)");
  }
  return b;
}

}  // namespace bpl
