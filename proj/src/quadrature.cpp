#include "bpl/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <cstdlib>
#include <cstdio>
#include <vector>

#include "bpl/fft.hpp"
#include "gauss12.hpp"

namespace bpl::quad {
namespace {

constexpr size_t kNodeBudget = size_t{1} << 22;  // angular nodes per circle
constexpr size_t kChunk = 4096;
constexpr size_t kFullGridLimit = size_t{1} << 21;
constexpr int kMaxCells = 256;
constexpr double kInf = std::numeric_limits<double>::infinity();

using detail::GaussRule;
using detail::gauss12;

// ------------------------------------------------------------- grid sizes

// Admissible circle sizes 16 * {4,5,6,7} * 2^k: within 25% of any request,
// FFT-friendly, and even so that doubling stays admissible.
size_t quantize_pts(double want) {
  static const std::vector<size_t> sizes = [] {
    std::vector<size_t> v;
    for (size_t k = 0; (size_t{16} << k) <= kNodeBudget; ++k)
      for (size_t odd : {size_t{4}, size_t{5}, size_t{6}, size_t{7}}) {
        const size_t n = (size_t{16} << k) * odd;
        if (n <= kNodeBudget) v.push_back(n);
      }
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }();
  if (want >= double(kNodeBudget)) return kNodeBudget;
  const auto it =
      std::lower_bound(sizes.begin(), sizes.end(), size_t(std::ceil(want)));
  return it == sizes.end() ? kNodeBudget : *it;
}

// --------------------------------------------------------------- angles

// cos/sin of th_j = 2*pi*j/n + (half ? pi/n : 0) for j = k0..k0+cnt, by
// incremental rotation resynchronized every 256 points.
void fill_angles(size_t n, bool half, size_t k0, size_t cnt, double* cs,
                 double* sn) {
  const double step = kTwoPi / double(n);
  const double cstep = std::cos(step), sstep = std::sin(step);
  size_t j = 0;
  while (j < cnt) {
    const size_t run = std::min<size_t>(128, cnt - j);
    const double t =
        step * double(k0 + j) + (half ? kPi / double(n) : 0.0);
    double c = std::cos(t), s = std::sin(t);
    for (size_t i = 0; i < run; ++i) {
      cs[j + i] = c;
      sn[j + i] = s;
      const double cn = c * cstep - s * sstep;
      s = s * cstep + c * sstep;
      c = cn;
    }
    j += run;
  }
}

// --------------------------------------------------------------- sampler

// Uniform internal interface: real nonnegative integrand values on circle
// grids, with an optional whole-grid fast path.
struct Sampler {
  std::function<void(double r, size_t n, bool half, size_t k0, size_t cnt,
                     const double* cs, const double* sn, double* out)>
      chunk;
  std::function<bool(double r, size_t n, bool half, double* out)> full;
  double hint = 0.0;
  double sscale = 0.0;
  bool boundary_ok = false;
};

void apply_power(const cplx* v, size_t cnt, double p, double* out) {
  if (p == 1.0) {
    for (size_t i = 0; i < cnt; ++i) out[i] = std::sqrt(std::norm(v[i]));
  } else if (p == 2.0) {
    for (size_t i = 0; i < cnt; ++i) out[i] = std::norm(v[i]);
  } else {
    for (size_t i = 0; i < cnt; ++i)
      out[i] = std::pow(std::norm(v[i]), 0.5 * p);
  }
}

Sampler make_sampler(const CircleFn& f, double p) {
  Sampler s;
  s.hint = f.hint_degree;
  s.sscale = f.spectral_scale;
  s.boundary_ok = f.boundary_ok;
  auto eval = f.eval;
  s.chunk = [eval, p](double r, size_t n, bool half, size_t k0, size_t cnt,
                      const double* cs, const double* sn, double* out) {
    static thread_local std::vector<cplx> buf;
    buf.resize(cnt);
    eval(r, n, half, k0, cnt, cs, sn, buf.data());
    apply_power(buf.data(), cnt, p, out);
  };
  if (f.full_eval) {
    auto fe = f.full_eval;
    s.full = [fe, p](double r, size_t n, bool half, double* out) -> bool {
      if (n > kFullGridLimit) return false;
      static thread_local std::vector<cplx> buf;
      buf.resize(n);
      fe(r, n, half, buf.data());
      apply_power(buf.data(), n, p, out);
      return true;
    };
  }
  return s;
}

Sampler make_sampler(const RealCircleFn& g) {
  Sampler s;
  s.hint = g.hint_degree;
  s.sscale = g.spectral_scale;
  s.boundary_ok = g.boundary_ok;
  s.chunk = g.eval;
  return s;
}

void sample_grid(const Sampler& f, double r, size_t n, bool half,
                 double* out) {
  if (f.full && f.full(r, n, half, out)) return;
  static thread_local std::vector<double> cs, sn;
  for (size_t k0 = 0; k0 < n; k0 += kChunk) {
    const size_t cnt = std::min(kChunk, n - k0);
    cs.resize(cnt);
    sn.resize(cnt);
    fill_angles(n, half, k0, cnt, cs.data(), sn.data());
    f.chunk(r, n, half, k0, cnt, cs.data(), sn.data(), out + k0);
  }
}

// --------------------------------------------------------------- ladder

// Aliasing bound from the sampled spectrum. The trapezoid error of the mean
// is sum over l >= 1 of (c_{lN} + c_{-lN}). The two top octave sums E0, E1
// fit a power law |c_k| ~ C k^{-alpha} (alpha = 1 - log2(E1/E0)); the bound
// is the aliased tail of that model, 2 C zeta(alpha) N^{-alpha}. A power law
// is the conservative extrapolation: integrands here are moduli of analytic
// functions, whose spectra decay either exponentially (resolved analytic
// scale) or algebraically (|.|-type dips at near-circle zeros of the
// derivative), never slower once the octave ratio is below 0.9. Returns
// (alias bound, roundoff floor); the bound is infinite while the top octave
// has not started decaying (ratio > 0.9), which forces another doubling.
std::pair<double, double> spectrum_estimate(std::span<const double> h,
                                            double hint) {
  const size_t n = h.size();
  static thread_local std::vector<cplx> spec;
  spec.resize(n / 2 + 1);
  fft::real_spectrum(h, spec);
  auto band = [&](size_t lo, size_t hi) {  // sum of |c_k| for k in (lo, hi]
    double s = 0.0;
    for (size_t k = lo + 1; k <= hi; ++k) s += std::abs(spec[k]);
    return s / double(n);
  };
  const double c0 = std::abs(spec[0]) / double(n);
  const double e0 = band(n / 8, n / 4);
  const double e1 = band(n / 4, n / 2);
  // Roundoff floor: point-coordinate jitter of relative size ~eps is
  // amplified by the integrand's polynomial degree (power amplification for
  // high powers, factor-count accumulation for products).
  const double floor = (1e-14 + 2e-15 * (hint + 1.0)) * c0;
  // Per-bin spectral magnitude of that jitter, summed over a quarter of the
  // bins: below this the octave sums carry no information about the
  // integrand and must not drive refinement.
  const double noise = (1e-15 + 2e-16 * (hint + 1.0)) * c0 * double(n / 4);
  double alias;
  if (e1 <= 4.0 * noise) {
    alias = e1;  // spectrum has reached the FFT noise floor
  } else {
    const double g = e1 / std::max(e0, 1e-300);
    if (g > 0.9) {
      alias = kInf;
    } else {
      const double alpha = 1.0 - std::log2(g);
      // E1 = sum over (N/4, N/2] of C k^-alpha ~ C (N/4)^{1-alpha}
      //      (1 - 2^{1-alpha}) / (alpha - 1).
      const double c_scale = e1 * (alpha - 1.0) /
                             (std::pow(double(n) / 4.0, 1.0 - alpha) *
                              (1.0 - std::pow(2.0, 1.0 - alpha)));
      double zeta = 0.0;  // zeta(alpha), eight terms plus integral tail
      for (int k = 1; k <= 8; ++k) zeta += std::pow(double(k), -alpha);
      zeta += std::pow(9.0, 1.0 - alpha) / (alpha - 1.0);
      alias = 2.0 * c_scale * zeta * std::pow(double(n), -alpha);
    }
  }
  return {alias, floor};
}

QuadratureResult ladder_mean(const Sampler& f, double r, double tol) {
  QuadratureResult res;
  const double margin = std::max((1.0 - r) + std::max(f.sscale, 0.0), 1e-9);
  const double bw = std::min(f.hint + 1.0, 3.3 / margin);
  // Start one doubling below the predicted resolution so the mandatory
  // refinement step lands on it; smooth integrands then stop right there.
  size_t n = quantize_pts(std::max(64.0, 4.0 * bw));

  std::vector<double> h(n);
  sample_grid(f, r, n, false, h.data());
  long evals = long(n);
  double value = pairwise_sum(h) / double(n);
  // Last three successive differences, d3 most recent.
  double d1 = kInf, d2 = kInf, d3 = kInf;
  int level = 0;
  double alias = kInf, floor = 0.0;
  // Richardson extrapolation of the difference sequence: valid once three
  // doublings contract by consistent factors in the algebraic window (the
  // regime of |.|-type dips, where successive errors shrink ~4x and the
  // spectral tail bound is far too pessimistic).
  auto contraction_est = [&]() -> double {
    if (!(d3 >= 0.0 && d2 > d3 && d1 > d2)) return kInf;
    if (d3 == 0.0) return floor;
    const double r32 = d2 / d3, r21 = d1 / d2;
    if (r32 < 1.7 || r32 > 16.0 || r21 < 1.7 || r21 > 16.0) return kInf;
    return std::max(1.5 * d3 / (std::min(r32, r21) - 1.0), floor);
  };
  while (true) {
    std::tie(alias, floor) = spectrum_estimate(h, f.hint);
    if (level > 0) {
      if (d3 <= tol && alias <= std::max(tol, 4.0 * floor)) break;
      if (d3 <= tol && contraction_est() <= tol) break;
      // Two successive differences at the roundoff floor: converged to
      // machine precision regardless of what the (noise) spectrum says.
      if (level >= 2 && d3 <= 4.0 * floor && d2 <= 4.0 * floor) break;
    }
    if (2 * n > kNodeBudget) break;
    static thread_local std::vector<double> mid;
    mid.resize(n);
    sample_grid(f, r, n, true, mid.data());
    evals += long(n);
    std::vector<double> h2(2 * n);
    for (size_t i = 0; i < n; ++i) {
      h2[2 * i] = h[i];
      h2[2 * i + 1] = mid[i];
    }
    h.swap(h2);
    n *= 2;
    ++level;
    const double prev = value;
    value = pairwise_sum(h) / double(n);
    d1 = d2;
    d2 = d3;
    d3 = std::abs(value - prev);
  }
  res.value = value;
  double cand = std::max(level > 0 ? d3 : kInf, alias);
  cand = std::min(cand, contraction_est());
  if (level >= 2 && d3 <= 4.0 * floor && d2 <= 4.0 * floor)
    cand = std::min(cand, 2.0 * std::max(d3, d2));
  res.abs_error_estimate = std::max(cand, floor);
  res.node_count = evals;
  res.converged = res.abs_error_estimate <= tol;
  if (std::getenv("BPLAB_TRACE_LADDER") && !(res.abs_error_estimate < 1e9))
    std::fprintf(stderr,
                 "[ladder] r=%.17g tol=%.3e n=%zu lev=%d val=%.6g d=(%.3e,"
                 "%.3e,%.3e) alias=%.3e fl=%.3e\n",
                 r, tol, n, level, value, d1, d2, d3, alias, floor);
  return res;
}

// --------------------------------------------------------- disk integrals

struct CellEval {
  double a = 0.0, b = 0.0;
  bool subst = false;
  double value = 0.0;
  double quad_est = 0.0;  // radial-rule error estimate
  double ang_est = 0.0;   // accumulated circle-mean error, coefficient-weighted
  double max_mean = 0.0;
  long nodes = 0;
};

struct DiskParams {
  double beta = 0.0;
  std::function<double(double)> smooth;  // extra smooth radial weight, or ≡1
  double tol_alloc = 0.0;                // per-node tol = tol_alloc / |coeff|
};

// One radial cell [a,b]: 12-point Gauss in r with per-node circle means.
// A substituted cell (b = 1) absorbs the (1-r)^beta weight exactly via
// 1 - r = (1-a) u^{1/(beta+1)}.
CellEval eval_cell(const Sampler& f, const DiskParams& dp, double a, double b,
                  bool subst) {
  const GaussRule& g = gauss12();
  CellEval c;
  c.a = a;
  c.b = b;
  c.subst = subst;
  std::array<double, 12> rr{}, cf{};
  if (!subst) {
    const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
    for (int i = 0; i < 12; ++i) {
      const double r = mid + hw * g.x[i];
      double wgt = hw * g.w[i] * 2.0 * r;
      if (dp.beta != 0.0) wgt *= std::pow(1.0 - r, dp.beta);
      if (dp.smooth) wgt *= dp.smooth(r);
      rr[i] = r;
      cf[i] = wgt;
    }
  } else {
    const double w = 1.0 - a;
    const double bp1 = dp.beta + 1.0;
    const double front = std::pow(w, bp1) / bp1;
    for (int i = 0; i < 12; ++i) {
      const double u = 0.5 * (g.x[i] + 1.0);
      const double r = 1.0 - w * std::pow(u, 1.0 / bp1);
      double wgt = front * 0.5 * g.w[i] * 2.0 * r;
      if (dp.smooth) wgt *= dp.smooth(r);
      rr[i] = r;
      cf[i] = wgt;
    }
  }
  std::array<double, 12> contrib{};
  for (int i = 0; i < 12; ++i) {
    const double tol_i = dp.tol_alloc / std::max(std::abs(cf[i]), 1e-300);
    const QuadratureResult qr = ladder_mean(f, rr[i], tol_i);
    contrib[i] = cf[i] * qr.value;
    c.nodes += qr.node_count;
    c.ang_est += std::abs(cf[i]) * qr.abs_error_estimate;
    c.max_mean = std::max(c.max_mean, qr.value);
  }
  c.value = pairwise_sum(contrib);
  double s6 = 0.0;
  for (int j = 0; j < 6; ++j) {
    const int i = g.sub_idx[j];
    s6 += (g.sub_w[j] / g.w[i]) * contrib[i];
  }
  c.quad_est = 0.25 * std::abs(c.value - s6);
  return c;
}

QuadratureResult disk_core(const Sampler& f, double beta,
                           std::function<double(double)> smooth, double r_lo,
                           double r_hi, double tol) {
  if (!(r_lo >= 0.0 && r_lo < r_hi && r_hi <= 1.0))
    throw Error("disk_integral: need 0 <= r_lo < r_hi <= 1");
  if (r_hi == 1.0 && beta <= -1.0)
    throw Error("disk_integral: weight (1-r)^beta not integrable (beta <= -1)");
  if (!(tol > 0.0)) throw Error("disk_integral: need tol > 0");

  // Integrands that are singular on the boundary with beta > 0: stop at
  // 1 - 1e-8 and account for the discarded ring analytically below.
  double r_top = r_hi;
  bool capped = false;
  if (r_hi == 1.0 && beta > 0.0 && !f.boundary_ok) {
    r_top = 1.0 - 1e-8;
    capped = true;
  }
  const bool subst_last = (r_top == 1.0 && beta != 0.0);

  // Geometric breakpoints 1 - 2^{-k}, graded down to the integrand's radial
  // variation scale (or to the cap).
  const double dt =
      capped ? 1.25e-8
             : std::clamp(std::max(f.sscale, 1.0 / (8.0 * (f.hint + 1.0))),
                          0x1p-34, 0.5);
  std::vector<double> bps;
  bps.push_back(r_lo);
  for (int k = 1; k <= 40; ++k) {
    const double w = std::ldexp(1.0, -k);
    if (w < dt) break;
    const double bp = 1.0 - w;
    if (bp <= r_lo + 1e-12) continue;
    if (bp >= r_top - 0.25 * w) break;
    bps.push_back(bp);
  }
  bps.push_back(r_top);

  const int ncells0 = int(bps.size()) - 1;
  DiskParams dp{beta, std::move(smooth),
                0.45 * tol / (12.0 * double(ncells0))};

  std::vector<CellEval> cells;
  cells.reserve(size_t(ncells0) + 8);
  for (int i = 0; i < ncells0; ++i)
    cells.push_back(eval_cell(f, dp, bps[i], bps[i + 1],
                              subst_last && i == ncells0 - 1));

  const double smooth_top = dp.smooth ? dp.smooth(1.0) : 1.0;
  double est = kInf;
  while (true) {
    double qsum = 0.0, asum = 0.0;
    for (const CellEval& c : cells) {
      qsum += c.quad_est;
      asum += c.ang_est;
    }
    double tail = 0.0;
    if (capped) {
      double mref = 0.0;
      double deepest = -1.0;
      for (const CellEval& c : cells)
        if (c.a > deepest) {
          deepest = c.a;
          mref = c.max_mean;
        }
      tail = 4.0 * mref * smooth_top * std::pow(1e-8, beta + 1.0) /
             (beta + 1.0);
    }
    est = qsum + asum + tail;
    if (est <= tol || int(cells.size()) >= kMaxCells) break;
    int worst = -1;
    for (int i = 0; i < int(cells.size()); ++i)
      if (worst < 0 || cells[i].quad_est > cells[worst].quad_est ||
          (cells[i].quad_est == cells[worst].quad_est &&
           cells[i].a < cells[worst].a))
        worst = i;
    if (cells[worst].quad_est <= 0.05 * est) break;  // angular error dominates
    const CellEval old = cells[worst];
    const double mid =
        old.subst ? 0.5 * (old.a + 1.0) : 0.5 * (old.a + old.b);
    cells[worst] = eval_cell(f, dp, old.a, mid, false);
    cells.push_back(eval_cell(f, dp, mid, old.b, old.subst));
  }

  std::sort(cells.begin(), cells.end(),
            [](const CellEval& x, const CellEval& y) { return x.a < y.a; });
  std::vector<double> vals;
  vals.reserve(cells.size());
  QuadratureResult res;
  for (const CellEval& c : cells) {
    vals.push_back(c.value);
    res.node_count += c.nodes;
  }
  res.value = pairwise_sum(vals);
  res.abs_error_estimate = est;
  res.converged = est <= tol;
  return res;
}

}  // namespace

// ----------------------------------------------------------- public API

QuadratureResult circle_mean(const CircleFn& f, double r, double p,
                             double tol) {
  if (!(r >= 0.0 && r <= 1.0)) throw Error("circle_mean: need 0 <= r <= 1");
  if (r == 1.0 && !f.boundary_ok)
    throw Error("circle_mean: r = 1 needs a boundary-continuous handle");
  if (!(p > 0.0)) throw Error("circle_mean: need p > 0");
  if (!(tol > 0.0)) throw Error("circle_mean: need tol > 0");
  return ladder_mean(make_sampler(f, p), r, tol);
}

QuadratureResult circle_mean_real(const RealCircleFn& g, double r,
                                  double tol) {
  if (!(r >= 0.0 && r <= 1.0))
    throw Error("circle_mean_real: need 0 <= r <= 1");
  if (r == 1.0 && !g.boundary_ok)
    throw Error("circle_mean_real: r = 1 needs a boundary-continuous handle");
  if (!(tol > 0.0)) throw Error("circle_mean_real: need tol > 0");
  return ladder_mean(make_sampler(g), r, tol);
}

QuadratureResult disk_integral(const CircleFn& f_prime, double p, double beta,
                               double r_lo, double r_hi, double tol) {
  if (!(p > 0.0)) throw Error("disk_integral: need p > 0");
  return disk_core(make_sampler(f_prime, p), beta, {}, r_lo, r_hi, tol);
}

QuadratureResult disk_integral_real(const RealCircleFn& g, double beta,
                                    double r_lo, double r_hi, double tol) {
  return disk_core(make_sampler(g), beta, {}, r_lo, r_hi, tol);
}

QuadratureResult I_of(const BlaschkeProduct& b, double tol) {
  return disk_integral(blaschke_deriv_fn(b), 1.0, 0.0, 0.0, 1.0, tol);
}

std::pair<QuadratureResult, double> area_identity_check(const ComplexPoly& p) {
  long double sum = 0.0L;
  const auto& c = p.coeffs();
  for (size_t k = 1; k < c.size(); ++k)
    sum += (long double)(k) / (long double)(k + 1) *
           (long double)std::norm(c[k]);
  const double tol = 1e-9 * (1.0 + double(sum));
  Sampler s = make_sampler(poly_deriv_fn(p), 2.0);
  QuadratureResult qr =
      disk_core(s, 1.0, [](double r) { return 1.0 + r; }, 0.0, 1.0, tol);
  return {qr, double(sum)};
}

HardyNorm hardy_norm(const CircleFn& f, double p, double r_max, double tol) {
  if (!(p > 0.0)) throw Error("hardy_norm: need p > 0");
  if (!(r_max >= 0.0 && r_max < 1.0))
    throw Error("hardy_norm: need 0 <= r_max < 1");
  HardyNorm h;
  h.r_max = r_max;
  h.mean = circle_mean(f, r_max, p, tol);
  h.value = std::pow(std::max(h.mean.value, 0.0), 1.0 / p);
  return h;
}

// ------------------------------------------------------- handle builders

namespace {

void scale_points(double r, const double* cs, const double* sn, size_t cnt,
                  std::vector<double>& xs, std::vector<double>& ys) {
  xs.resize(cnt);
  ys.resize(cnt);
  for (size_t i = 0; i < cnt; ++i) {
    xs[i] = r * cs[i];
    ys[i] = r * sn[i];
  }
}

}  // namespace

CircleFn blaschke_deriv_fn(const BlaschkeProduct& b) {
  CircleFn f;
  const BlaschkeProduct* bp = &b;
  f.eval = [bp](double r, size_t, bool, size_t, size_t cnt, const double* cs,
                const double* sn, cplx* out) {
    static thread_local std::vector<double> xs, ys;
    scale_points(r, cs, sn, cnt, xs, ys);
    bp->eval_batch(xs.data(), ys.data(), cnt, nullptr, out);
  };
  f.hint_degree = double(b.degree());
  f.spectral_scale = 1.0 - b.max_zero_radius();
  f.boundary_ok = true;
  return f;
}

CircleFn blaschke_value_fn(const BlaschkeProduct& b) {
  CircleFn f;
  const BlaschkeProduct* bp = &b;
  f.eval = [bp](double r, size_t, bool, size_t, size_t cnt, const double* cs,
                const double* sn, cplx* out) {
    static thread_local std::vector<double> xs, ys;
    scale_points(r, cs, sn, cnt, xs, ys);
    bp->eval_batch(xs.data(), ys.data(), cnt, out, nullptr);
  };
  f.hint_degree = double(b.degree());
  f.spectral_scale = 1.0 - b.max_zero_radius();
  f.boundary_ok = true;
  return f;
}

namespace {

CircleFn poly_fn_impl(ComplexPoly poly) {
  CircleFn f;
  auto sp = std::make_shared<const ComplexPoly>(std::move(poly));
  f.eval = [sp](double r, size_t, bool, size_t, size_t cnt, const double* cs,
                const double* sn, cplx* out) {
    static thread_local std::vector<double> xs, ys;
    scale_points(r, cs, sn, cnt, xs, ys);
    sp->eval_batch(xs.data(), ys.data(), cnt, out, nullptr);
  };
  f.full_eval = [sp](double r, size_t n, bool half, cplx* out) {
    sp->circle_values(r, half ? kPi / double(n) : 0.0, {out, n});
  };
  f.hint_degree = double(sp->degree());
  f.spectral_scale = 0.0;
  f.boundary_ok = true;
  return f;
}

}  // namespace

CircleFn poly_fn(const ComplexPoly& p) { return poly_fn_impl(p); }

CircleFn poly_deriv_fn(const ComplexPoly& p) {
  return poly_fn_impl(p.derivative());
}

CircleFn const_fn(cplx c) {
  CircleFn f;
  f.eval = [c](double, size_t, bool, size_t, size_t cnt, const double*,
               const double*, cplx* out) {
    std::fill(out, out + cnt, c);
  };
  f.full_eval = [c](double, size_t n, bool, cplx* out) {
    std::fill(out, out + n, c);
  };
  f.hint_degree = 0.0;
  f.spectral_scale = 1.0;
  f.boundary_ok = true;
  return f;
}

}  // namespace bpl::quad
