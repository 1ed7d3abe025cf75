#pragma once
// Experiment drivers: random product families, inequality sweeps with bound
// checks, growth-rate fitting, and the flat-polynomial construction used for
// the lower-rate evidence.
//
// Concurrency: every parameter grid point is an independent task; per-task
// randomness comes from RngStream::from(master_seed, task_index), and records
// are merged in task order, so results are identical for any worker count.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "bpl/blaschke.hpp"
#include "bpl/complexpoly.hpp"
#include "bpl/domains.hpp"
#include "bpl/quadrature.hpp"
#include "bpl/rational.hpp"
#include "bpl/records.hpp"
#include "bpl/rng.hpp"

namespace bpl::experiments {

// ----------------------------------------------------------------- plumbing

// Worker count: explicit argument if > 0, else the BPLAB_JOBS environment
// variable, else hardware concurrency.
int resolve_jobs(int requested);

// Run fn(i) for i in [0, count) on `jobs` workers. Exceptions propagate.
void parallel_for(int jobs, int count, const std::function<void(int)>& fn);

enum class GrowthModel { power, log_growth, sqrt_log, constant };

struct FitResult {
  double slope = 0.0;
  double constant = 0.0;
  double r2 = 0.0;
};

// Least squares on the model's linearizing transform:
//   power:      log y = log c + s log x      (returns slope s, constant c)
//   log_growth: y = c + s log x
//   sqrt_log:   y = c + s sqrt(log x)
//   constant:   y = c (slope fixed at 0)
// Requires >= 3 points, xs strictly increasing, ys > 0 for the power model.
FitResult fit_growth(std::span<const double> xs, std::span<const double> ys,
                     GrowthModel model);

// ----------------------------------------------------------------- families

enum class ZeroLaw { uniform_disk, boundary_band, clustered };

const char* zero_law_name(ZeroLaw law);

// Random zero draws. delta parameterizes boundary_band (radius uniform in
// [1-delta, 1-delta/2]); pass 0 for the default delta = 1/n. uniform_disk is
// area-uniform with radii capped at 1 - 1/(8(n+1)); clustered puts radii in
// [0.96, 0.98] inside a 0.1-radian angular window.
std::vector<cplx> random_zeros(ZeroLaw law, int n, double delta,
                               RngStream& rng);

// ------------------------------------------------- upper-bound random sweep

// For each degree and sample, a random product via the zero law and its
// integral of |B'| over the disk; checks measured <= pi(1 + sqrt(log n)) with
// relative slack tol_bound = 1e-6. One record per (degree, sample).
std::vector<ExperimentRecord> verify_theorem1_upper(
    std::span<const int> degrees, int samples_per_degree, ZeroLaw law,
    double delta, std::uint64_t seed, int jobs);

// ------------------------------------------------- flat-block construction

enum class BlockStrategy { rudin_shapiro_scaled, random_signs, random_phases };

const char* block_strategy_name(BlockStrategy s);

struct FlatBlocksOutcome {
  ComplexPoly p;              // sum of the frequency blocks
  double sup_norm = 0.0;      // boundary sup of p
  double entropy_ratio = 0.0; // sum |a_k|^2 r^{2k} / log(1/(1-r)), r = 1-1/m
  int degree = 0;             // m = deg p
  int coeffs_used = 0;        // K actually consumed by the product fit
  bool early_termination = false;
  std::optional<RationalFunction> product;  // built from q's Taylor section
  quad::QuadratureResult integral;  // integral of |product'| over the disk
  ExperimentRecord record;
};

// Builds p = sum_{j=1..j_max} b_j with block b_j supported on the top half
// of the frequency band [4^j, 4^{j+1}), i.e. [2*4^j, 4^{j+1}-1], so the
// degree is m = 4^{j_max+1}-1. rudin_shapiro_scaled uses a Rudin-Shapiro
// polynomial of length 2^{2j+1} scaled by 2^{-(j+1)} (boundary sup of each
// block at most 1, coefficient energy 1/2); the random strategies draw +-1
// signs / unit phases and are sup-normalized per block. With
// sign_randomization each block also gets an independent +-1 factor. The
// product comes from the first K Taylor coefficients of q = p / sup(p); K
// starts at min(m+1, k_cap) and halves until the coefficient fit verifies,
// with the achieved K recorded. The conservative default cap keeps the
// single-shot construction cheap; the sweep raises it so the product tracks
// the full polynomial.
FlatBlocksOutcome flat_blocks_construct(int j_max, BlockStrategy strategy,
                                        bool sign_randomization,
                                        std::uint64_t seed, int k_cap = 256,
                                        double quad_tol = 5e-3);

// The j-grid sweep: one record per j plus a fit record for the ratio
// integral / sqrt(log m) against log m (positive minimum and non-negative
// slope are the sharpness evidence).
std::vector<ExperimentRecord> lower_bound_sweep(int j_lo, int j_hi,
                                                BlockStrategy strategy,
                                                bool sign_randomization,
                                                std::uint64_t seed, int jobs,
                                                int k_cap = 16384);

// ------------------------------------------------- truncation tail bounds

// A bounded analytic function handled by coefficients plus point evaluators.
struct AnalyticHandle {
  std::string label;
  std::vector<cplx> taylor;              // enough coefficients for truncation
  std::function<cplx(cplx)> value;
  std::function<cplx(cplx)> deriv;
};

// Default family: 0.99 x (degree-64 product), 0.99 x (normalized flat-block
// polynomial), 0.99 x (single-factor product).
std::vector<AnalyticHandle> default_truncation_family(std::uint64_t seed);

// For p = the degree-n truncation of g: maxima of |p| and of |g' - p'| over
// the disk |z| <= 1 - 2 log n / n, checked against the working constant 2
// (valid for n >= 3). One record per (handle, n).
std::vector<ExperimentRecord> lemma1_check(
    std::span<const AnalyticHandle> family, std::span<const int> n_grid);

// ------------------------------------------------- n-valent circle means

// Checks (1/2pi) int |B'(r e^{it})|^2 dt <= n/(1-r) over the radius grid.
// Returns one record carrying the worst ratio across the grid.
ExperimentRecord lemma2_check(const BlaschkeProduct& b,
                              std::span<const double> r_grid);

// ------------------------------------------------- domain-integral sweeps

enum class RationalFamily { power_w_n, random_blaschke_in_w,
                            boundary_pole_rational };

const char* rational_family_name(RationalFamily f);

// Area integral of |R'|^p over G, computed in the disk as
// int |(R o phi)'|^p |phi'|^{2-p} dA, normalized by the boundary sup M^p.
// One record per degree plus a fit record; the fit record's violation flag
// reports the boundedness property (running max of ratio-to-rate grows by
// < 25% over the top half of the degree grid).
std::vector<ExperimentRecord> dolzhenko_scaling(const DomainMap& d, double p,
                                                std::span<const int> degrees,
                                                RationalFamily family,
                                                std::uint64_t seed, int jobs);

// p = 1 with predicted rate sqrt(log(n+1)); for the disk the flat-block
// products (j = 1..5) are appended as lower-rate evidence.
std::vector<ExperimentRecord> theorem3_scaling(const DomainMap& d,
                                               std::span<const int> degrees,
                                               std::uint64_t seed, int jobs);

// ------------------------------------------------- interior-clearance bound

// ||R'||_{A^p(G_rho)} <= n^{1/p} rho^{1/p - 1/q} M over the subdomain at
// distance > rho from the boundary. For disk/polygon/rectangle the subdomain
// is again of the same kind (erosion), so the mask is handled exactly by
// integrating through the eroded domain's own map; model_holder falls back
// to per-node mask sampling.
ExperimentRecord theorem4_check(const DomainMap& d, double p, double rho,
                                const RationalFunction& r_in_w);

// Family sweep across (p, rho, degree, family) grids.
std::vector<ExperimentRecord> theorem4_sweep(
    const DomainMap& d, std::span<const double> ps,
    std::span<const double> rhos, std::span<const int> degrees,
    std::span<const RationalFamily> families, std::uint64_t seed, int jobs);

// ------------------------------------------------- weighted-area regimes

enum class WeightRegime { constant_rate, log_power, power_law };

const char* regime_name(WeightRegime r);

// Predicted regime for the weighted integral int |R'|^p d_G^beta dA from
// (p, beta) and the domain's map-derivative integrability; throws naming the
// failed hypothesis when the combination is inadmissible.
WeightRegime predicted_regime(const DomainMap& d, double p, double beta);

struct RegimeClassification {
  WeightRegime predicted;
  WeightRegime chosen;
  double fitted_exponent = 0.0;
  double target_exponent = 0.0;
  bool matches = false;      // chosen == predicted and exponent within 15%
  FitResult fit;
};

// Classifies a measured growth sequence against the three candidate rates.
RegimeClassification classify_regime(const DomainMap& d, double p, double beta,
                                     std::span<const double> ns,
                                     std::span<const double> values);

// I_{p,beta}(R)/M^p across degrees via the pullback with weight
// d_G(phi(z))^beta; per-degree records plus a classification record. The
// family is R = w^n / M except in the log-rate regime on the disk, where the
// power family is non-extremal and the flat-block products (at their block
// degrees up to max(degrees)) supply data that attains the predicted rate.
std::vector<ExperimentRecord> theorem5_scaling(const DomainMap& d, double p,
                                               double beta,
                                               std::span<const int> degrees,
                                               std::uint64_t seed, int jobs);

// ------------------------------------------------- exploratory probe

// Conjectured bound int |(R o phi)'|^p (1-|z|)^{p-2} dA <= C n M^p for
// p in (1,2): reports the ratio only, labeled NON-NORMATIVE, no assertion.
std::vector<ExperimentRecord> probe_open_peller(const DomainMap& d, double p,
                                                std::span<const int> degrees,
                                                RationalFamily family,
                                                std::uint64_t seed, int jobs);

}  // namespace bpl::experiments
