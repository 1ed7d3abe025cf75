#pragma once
// Thin wrappers around FFTW: cached plans, polynomial evaluation on circles,
// and Taylor coefficient recovery from circle samples.

#include <functional>
#include <span>
#include <vector>

#include "bpl/util.hpp"

namespace bpl::fft {

// In-place transform data[k] <- sum_j data[j] * exp(+2*pi*i*j*k/N).
// (Evaluates a coefficient vector at the N-th roots of unity.)
void backward(std::span<cplx> data);

// In-place transform data[k] <- sum_j data[j] * exp(-2*pi*i*j*k/N).
void forward(std::span<cplx> data);

// Spectrum of a real sample vector: out[k] = sum_j in[j] * exp(-2*pi*i*j*k/N)
// for k = 0 .. N/2 (out must have N/2 + 1 slots). N must be even.
void real_spectrum(std::span<const double> in, std::span<cplx> out);

// out[k] = p(r * exp(i*(2*pi*k/N + offset))) for k = 0..N-1, where p is the
// polynomial with the given coefficients (any degree; coefficients are folded
// modulo N, which is exact for evaluation on a uniform grid).
void poly_circle_eval(std::span<const cplx> coeffs, double r, double offset,
                      std::span<cplx> out);

// Taylor coefficients a_0..a_m of an analytic function from uniform circle
// samples at an adaptively chosen radius. `sample` must fill out[k] =
// f(r * exp(2*pi*i*k/N)). Accurate to ~1e-11 relative to max|a_j| for
// functions analytic on a neighbourhood of the closed disk of radius r.
std::vector<cplx> taylor_via_circle(
    const std::function<void(double r, size_t n, std::span<cplx> out)>& sample,
    int m);

}  // namespace bpl::fft
