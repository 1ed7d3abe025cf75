#include "bpl/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <unordered_map>

namespace bpl::fft {
namespace {

// FFTW plan creation is not thread safe; execution via the _dft entry points
// on private buffers is. Plans are created unaligned so they can run on any
// vector's storage.
std::mutex g_plan_mutex;

fftw_plan complex_plan(size_t n, int sign) {
  static std::unordered_map<size_t, fftw_plan> fwd, bwd;
  std::lock_guard lock(g_plan_mutex);
  auto& cache = sign == FFTW_FORWARD ? fwd : bwd;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> probe(n);
  auto* p = reinterpret_cast<fftw_complex*>(probe.data());
  fftw_plan plan =
      fftw_plan_dft_1d(int(n), p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(n, plan);
  return plan;
}

fftw_plan r2c_plan(size_t n) {
  static std::unordered_map<size_t, fftw_plan> cache;
  std::lock_guard lock(g_plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> pin(n);
  std::vector<cplx> pout(n / 2 + 1);
  fftw_plan plan = fftw_plan_dft_r2c_1d(
      int(n), pin.data(), reinterpret_cast<fftw_complex*>(pout.data()),
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(n, plan);
  return plan;
}

}  // namespace

void backward(std::span<cplx> data) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(complex_plan(data.size(), FFTW_BACKWARD), p, p);
}

void forward(std::span<cplx> data) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(complex_plan(data.size(), FFTW_FORWARD), p, p);
}

void real_spectrum(std::span<const double> in, std::span<cplx> out) {
  size_t n = in.size();
  if (n % 2 != 0 || out.size() != n / 2 + 1)
    throw Error("real_spectrum: need even N and N/2+1 output slots");
  fftw_execute_dft_r2c(r2c_plan(n), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void poly_circle_eval(std::span<const cplx> coeffs, double r, double offset,
                      std::span<cplx> out) {
  size_t n = out.size();
  std::fill(out.begin(), out.end(), cplx{0.0, 0.0});
  // Fold c_j * r^j * exp(i*j*offset) into bin j mod N. The rotation is kept
  // incrementally and re-synchronized periodically to stop error accumulation.
  cplx rot{1.0, 0.0};
  const cplx step{std::cos(offset), std::sin(offset)};
  double rj = 1.0;
  for (size_t j = 0; j < coeffs.size(); ++j) {
    if (j % 1024 == 0) {
      double a = offset * double(j);
      rot = {std::cos(a), std::sin(a)};
    }
    out[j % n] += coeffs[j] * (rj * rot);
    rot *= step;
    rj *= r;
    if (rj < 1e-320) break;  // remaining terms underflow
  }
  backward(out);
}

std::vector<cplx> taylor_via_circle(
    const std::function<void(double r, size_t n, std::span<cplx> out)>& sample,
    int m) {
  if (m < 0) throw Error("taylor_via_circle: m must be >= 0");
  if (m > (1 << 16)) throw Error("taylor_via_circle: m exceeds the supported budget");
  // Radius chosen so r^m ~ exp(-11.5) ~ 1e-5: large enough that dividing the
  // DFT by r^j does not amplify roundoff, small enough to stay inside the
  // disk; aliased coefficients are suppressed by r^N with N = 4(m+1) rounded
  // up to a power of two.
  double r = std::exp(-11.5 / double(m + 1));
  r = std::min(std::max(r, 0.3), 1.0 - 1e-6);
  size_t n = pow2_at_least(size_t(4) * size_t(m + 1));
  std::vector<cplx> buf(n);
  sample(r, n, buf);
  forward(buf);
  std::vector<cplx> coeffs(size_t(m) + 1);
  double inv_rj = 1.0;
  for (int j = 0; j <= m; ++j) {
    coeffs[size_t(j)] = buf[size_t(j)] * (inv_rj / double(n));
    inv_rj /= r;
  }
  return coeffs;
}

}  // namespace bpl::fft
