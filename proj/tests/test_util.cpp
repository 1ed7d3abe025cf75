// Utilities: deterministic streams, summation, formatting, result records,
// growth fitting, and the worker pool.
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "bpl/experiments.hpp"
#include "bpl/records.hpp"
#include "bpl/rng.hpp"
#include "bpl/util.hpp"

using namespace bpl;
using namespace bpl::experiments;

TEST_CASE("rng streams are deterministic and index-separated") {
  RngStream a = RngStream::from(123, 0);
  RngStream b = RngStream::from(123, 0);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream c = RngStream::from(123, 1);
  RngStream d = RngStream::from(124, 0);
  RngStream e = RngStream::from(123, 0);
  // Distinct task indices and distinct seeds give distinct streams.
  CHECK(c.next_u64() != e.next_u64());
  RngStream e2 = RngStream::from(123, 0);
  CHECK(d.next_u64() != e2.next_u64());
}

TEST_CASE("rng draws land in their ranges") {
  RngStream r = RngStream::from(7, 3);
  int pos = 0, neg = 0;
  for (int i = 0; i < 2000; ++i) {
    double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    double v = r.uniform(-2.0, 5.0);
    CHECK(v >= -2.0);
    CHECK(v < 5.0);
    double t = r.angle();
    CHECK(t >= 0.0);
    CHECK(t < kTwoPi);
    cplx z = r.on_circle();
    CHECK(std::abs(std::abs(z) - 1.0) < 1e-15);
    (r.sign() > 0 ? pos : neg)++;
  }
  // Both signs occur in quantity (probability of failure ~ 2^-2000).
  CHECK(pos > 500);
  CHECK(neg > 500);
}

TEST_CASE("pairwise sum is order-deterministic and accurate") {
  std::vector<double> v(10007);
  RngStream r = RngStream::from(9, 0);
  long double exact = 0.0L;
  for (auto& x : v) {
    x = r.uniform(-1.0, 1.0);
    exact += (long double)x;
  }
  const double s1 = pairwise_sum(v.data(), v.size());
  const double s2 = pairwise_sum(std::span<const double>(v));
  CHECK(s1 == s2);
  CHECK(std::abs(s1 - double(exact)) < 1e-11);
}

TEST_CASE("fmt_g17 round-trips doubles exactly") {
  RngStream r = RngStream::from(31, 0);
  for (int i = 0; i < 200; ++i) {
    const double x = std::ldexp(r.uniform(-1.0, 1.0), int(r.uniform(-40, 40)));
    CHECK(std::strtod(fmt_g17(x).c_str(), nullptr) == x);
  }
  CHECK(fmt_g17(0.0) == "0");
  CHECK(fmt_g17(1.0) == "1");
  CHECK(fmt_g17(0.5) == "0.5");
}

TEST_CASE("record csv line leaves missing fields empty") {
  ExperimentRecord rec;
  rec.experiment = "demo";
  rec.n = 12;
  rec.measured = 0.5;
  rec.violation = false;
  rec.wall_ms = 3.25;
  CHECK(rec.csv_line() == "demo,12,,,,,,0.5,,0,,,,3.25");

  ExperimentRecord full;
  full.experiment = "full";
  full.n = 3;
  full.p = 2.0;
  full.beta = -0.5;
  full.rho = 0.1;
  full.domain = "disk";
  full.seed = 77;
  full.measured = 1.0;
  full.bound = 2.0;
  full.violation = true;
  full.fit_slope = 0.25;
  full.fit_const = 4.0;
  full.r2 = 0.99;
  full.wall_ms = 0.0;
  CHECK(full.csv_line() ==
        "full,3,2,-0.5,0.1,disk,77,1,2,1,0.25,4,0.99,0");
}

TEST_CASE("to_csv emits the fixed header and trailing newline") {
  ExperimentRecord rec;
  rec.experiment = "x";
  std::string doc = to_csv({rec});
  const std::string header(kCsvHeader);
  CHECK(doc.substr(0, header.size()) == header);
  CHECK(doc.back() == '\n');
  CHECK(doc == header + "\n" + rec.csv_line() + "\n");
}

TEST_CASE("scan_records counts violations and non-convergence notes") {
  std::vector<ExperimentRecord> recs(4);
  recs[0].violation = true;
  recs[1].violation = false;
  recs[2].note("quadrature_converged", "false");
  recs[3].violation = true;
  recs[3].note("quadrature_converged", "true");
  auto flags = scan_records(recs);
  CHECK(flags.violations == 2);
  CHECK(flags.non_converged == 1);
}

TEST_CASE("json summary carries metadata, counts, and notes") {
  ExperimentRecord rec;
  rec.experiment = "demo";
  rec.fit_slope = 1.5;
  rec.note("hello", "world");
  std::string js = to_json_summary({rec}, {{"experiment", "demo"}});
  CHECK(js.find("\"log_convention\": \"natural\"") != std::string::npos);
  CHECK(js.find("\"record_count\": 1") != std::string::npos);
  CHECK(js.find("\"hello\": \"world\"") != std::string::npos);
  CHECK(js.find("\"fits\"") != std::string::npos);
}

TEST_CASE("fit_growth recovers exact models") {
  std::vector<double> xs, ys;
  for (int i = 2; i <= 12; ++i) {
    xs.push_back(double(i));
    ys.push_back(2.0 * std::sqrt(std::log(double(i))));
  }
  auto f = fit_growth(xs, ys, GrowthModel::sqrt_log);
  CHECK(std::abs(f.slope - 2.0) < 1e-12);
  CHECK(std::abs(f.constant) < 1e-12);
  CHECK(std::abs(f.r2 - 1.0) < 1e-12);

  for (size_t i = 0; i < xs.size(); ++i) ys[i] = 3.0 * std::pow(xs[i], 0.5);
  f = fit_growth(xs, ys, GrowthModel::power);
  CHECK(std::abs(f.slope - 0.5) < 1e-9);
  CHECK(std::abs(f.constant - 3.0) < 1e-9);

  for (size_t i = 0; i < xs.size(); ++i) ys[i] = 1.0 + 4.0 * std::log(xs[i]);
  f = fit_growth(xs, ys, GrowthModel::log_growth);
  CHECK(std::abs(f.slope - 4.0) < 1e-10);
  CHECK(std::abs(f.constant - 1.0) < 1e-10);

  for (size_t i = 0; i < xs.size(); ++i) ys[i] = 7.25;
  f = fit_growth(xs, ys, GrowthModel::constant);
  CHECK(f.slope == 0.0);
  CHECK(std::abs(f.constant - 7.25) < 1e-12);
  CHECK(f.r2 == 1.0);
}

TEST_CASE("fit_growth validates its inputs") {
  std::vector<double> bad_x{1.0, 1.0, 2.0};
  std::vector<double> ys{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(fit_growth(bad_x, ys, GrowthModel::power), Error);

  std::vector<double> two_x{1.0, 2.0};
  std::vector<double> two_y{1.0, 2.0};
  CHECK_THROWS_AS(fit_growth(two_x, two_y, GrowthModel::power), Error);

  std::vector<double> xs{1.0, 2.0, 3.0};
  std::vector<double> neg{1.0, -2.0, 3.0};
  CHECK_THROWS_AS(fit_growth(xs, neg, GrowthModel::power), Error);
}

TEST_CASE("parallel_for covers the index range on any worker count") {
  for (int jobs : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(257);
    for (auto& h : hits) h = 0;
    parallel_for(jobs, 257, [&](int i) { hits[size_t(i)]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
  // Empty range is a no-op.
  parallel_for(4, 0, [&](int) { CHECK(false); });
}

TEST_CASE("parallel_for propagates worker exceptions") {
  CHECK_THROWS_AS(parallel_for(4, 100,
                               [&](int i) {
                                 if (i == 63) throw Error("worker 63");
                               }),
                  Error);
}

TEST_CASE("resolve_jobs prefers the explicit request") {
  CHECK(resolve_jobs(5) == 5);
  CHECK(resolve_jobs(1) == 1);
  // Unset request falls back to something positive.
  CHECK(resolve_jobs(0) >= 1);
  CHECK(resolve_jobs(-3) >= 1);
}
