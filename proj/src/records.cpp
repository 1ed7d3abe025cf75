#include "bpl/records.hpp"

#include <json.hpp>

namespace bpl {

namespace {

std::string opt_num(const std::optional<double>& v) {
  return v ? fmt_g17(*v) : std::string{};
}

}  // namespace

std::string ExperimentRecord::csv_line() const {
  std::string line;
  line.reserve(192);
  line += experiment;
  line += ',';
  if (n) line += std::to_string(*n);
  line += ',';
  line += opt_num(p);
  line += ',';
  line += opt_num(beta);
  line += ',';
  line += opt_num(rho);
  line += ',';
  line += domain;
  line += ',';
  if (seed) line += std::to_string(*seed);
  line += ',';
  line += opt_num(measured);
  line += ',';
  line += opt_num(bound);
  line += ',';
  if (violation) line += *violation ? "1" : "0";
  line += ',';
  line += opt_num(fit_slope);
  line += ',';
  line += opt_num(fit_const);
  line += ',';
  line += opt_num(r2);
  line += ',';
  line += fmt_g17(wall_ms);
  return line;
}

std::string to_csv(const std::vector<ExperimentRecord>& records) {
  std::string out{kCsvHeader};
  out += '\n';
  for (const auto& r : records) {
    out += r.csv_line();
    out += '\n';
  }
  return out;
}

RunFlags scan_records(const std::vector<ExperimentRecord>& records) {
  RunFlags flags;
  for (const auto& r : records) {
    if (r.violation && *r.violation) ++flags.violations;
    for (const auto& [k, v] : r.notes)
      if (k == "quadrature_converged" && v == "false") ++flags.non_converged;
  }
  return flags;
}

std::string to_json_summary(
    const std::vector<ExperimentRecord>& records,
    const std::vector<std::pair<std::string, std::string>>& metadata) {
  nlohmann::ordered_json j;
  j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : metadata) j["metadata"][k] = v;
  j["metadata"]["log_convention"] = "natural";

  const RunFlags flags = scan_records(records);
  j["record_count"] = records.size();
  j["violations"] = flags.violations;
  j["quadrature_non_convergence"] = flags.non_converged;

  auto fits = nlohmann::ordered_json::array();
  auto recs = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json e;
    e["experiment"] = r.experiment;
    if (r.n) e["n"] = *r.n;
    if (r.p) e["p"] = *r.p;
    if (r.beta) e["beta"] = *r.beta;
    if (r.rho) e["rho"] = *r.rho;
    if (!r.domain.empty()) e["domain"] = r.domain;
    if (r.seed) e["seed"] = *r.seed;
    if (r.measured) e["measured"] = fmt_g17(*r.measured);
    if (r.bound) e["bound"] = fmt_g17(*r.bound);
    if (r.violation) e["violation"] = *r.violation;
    if (!r.notes.empty()) {
      auto notes = nlohmann::ordered_json::object();
      for (const auto& [k, v] : r.notes) notes[k] = v;
      e["notes"] = notes;
    }
    recs.push_back(std::move(e));
    if (r.fit_slope || r.fit_const || r.r2) {
      nlohmann::ordered_json f;
      f["experiment"] = r.experiment;
      if (r.n) f["n"] = *r.n;
      if (r.fit_slope) f["slope"] = fmt_g17(*r.fit_slope);
      if (r.fit_const) f["constant"] = fmt_g17(*r.fit_const);
      if (r.r2) f["r2"] = fmt_g17(*r.r2);
      fits.push_back(std::move(f));
    }
  }
  j["fits"] = std::move(fits);
  j["records"] = std::move(recs);
  return j.dump(2) + "\n";
}

}  // namespace bpl
