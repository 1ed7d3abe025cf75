#pragma once
// Result records for experiment runs plus their CSV / JSON serialization.
//
// The CSV schema is fixed: every file starts with the exact header
//   experiment,n,p,beta,rho,domain,seed,measured,bound,violation,fit_slope,fit_const,r2,wall_ms
// and a field that does not apply to an experiment is left empty, never
// dropped. All doubles are written with 17 significant digits so files
// round-trip bit-for-bit; wall_ms is the only column excluded from the
// determinism contract.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bpl/util.hpp"

namespace bpl {

struct ExperimentRecord {
  std::string experiment;
  std::optional<long long> n;
  std::optional<double> p;
  std::optional<double> beta;
  std::optional<double> rho;
  std::string domain;  // empty when not applicable
  std::optional<std::uint64_t> seed;
  std::optional<double> measured;
  std::optional<double> bound;
  std::optional<bool> violation;
  std::optional<double> fit_slope;
  std::optional<double> fit_const;
  std::optional<double> r2;
  double wall_ms = 0.0;

  // Free-form per-record annotations; they go to the JSON summary, not the
  // CSV (which has a fixed schema).
  std::vector<std::pair<std::string, std::string>> notes;

  void note(std::string key, std::string value) {
    notes.emplace_back(std::move(key), std::move(value));
  }

  // One CSV line (no trailing newline), columns in schema order.
  std::string csv_line() const;
};

inline constexpr const char* kCsvHeader =
    "experiment,n,p,beta,rho,domain,seed,measured,bound,violation,fit_slope,"
    "fit_const,r2,wall_ms";

// Full CSV document: header plus one line per record, '\n' separated, with a
// trailing newline.
std::string to_csv(const std::vector<ExperimentRecord>& records);

// JSON summary: run metadata, violation / non-convergence counts, fitted
// models, and the per-record annotations. `metadata` carries run-level
// key/value pairs (parameters echoed back, log convention, and so on).
std::string to_json_summary(
    const std::vector<ExperimentRecord>& records,
    const std::vector<std::pair<std::string, std::string>>& metadata);

// Aggregate flags used for exit-code decisions.
struct RunFlags {
  int violations = 0;       // records with violation == true
  int non_converged = 0;    // records annotated quadrature_converged=false
};
RunFlags scan_records(const std::vector<ExperimentRecord>& records);

}  // namespace bpl
