#include <doctest.h>

#include <cmath>

#include "cohlab/experiment.hpp"
#include "cohlab/model_parse.hpp"

using namespace cohlab;

namespace {

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (int i = 0;; ++i) {
    const double r = lo + i * step;
    if (r > hi + 1e-9) break;
    g.push_back(std::min(r, 1.0));
  }
  return g;
}

}  // namespace

TEST_CASE("Wilson intervals") {
  auto [a, b] = wilson_interval(0, 10);
  CHECK(a == 0.0);
  CHECK(b == doctest::Approx(0.2775327998628892).epsilon(1e-12));
  auto [c, d] = wilson_interval(10, 20);
  CHECK(c == doctest::Approx(0.2992980081982123).epsilon(1e-12));
  CHECK(d == doctest::Approx(0.7007019918017877).epsilon(1e-12));
  auto [e, f] = wilson_interval(10, 10);
  CHECK(f == 1.0);
  CHECK(e == doctest::Approx(1 - 0.2775327998628892).epsilon(1e-12));
  CHECK_THROWS_AS(wilson_interval(0, 0), std::invalid_argument);

  const SweepRecord r = make_record(0.3, 20, 10);
  CHECK(r.success_rate == 0.5);
  CHECK(r.ci_low == c);
}

TEST_CASE("sweep config validation") {
  SweepConfig cfg{"lowrank:m=3,n=3,r=1", {0.2, 0.5, 1.0}, 5, 1};
  CHECK_NOTHROW(validate(cfg));
  auto bad = cfg;
  bad.rho_grid = {};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.rho_grid = {0.5, 0.2};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.rho_grid = {0.0, 0.5};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.rho_grid = {0.5, 1.5};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.trials = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.lambda = 0.5;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.tol = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("sweep properties") {
  SweepConfig cfg{"cayley:n=8,d=2", grid(0.1, 1.0, 0.1), 60, 5};
  const auto recs = run_sweep(cfg);
  REQUIRE(recs.size() == cfg.rho_grid.size());
  CHECK(recs.back().rho == 1.0);
  CHECK(recs.back().success_rate == 1.0);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].trials == 60);
    CHECK(recs[i].successes <= recs[i].trials);
    CHECK(recs[i].success_rate == double(recs[i].successes) / 60);
    CHECK(recs[i].ci_low <= recs[i].success_rate);
    CHECK(recs[i].ci_high >= recs[i].success_rate);
    // Masks are nested within a trial, so counts never drop.
    if (i > 0) CHECK(recs[i].successes >= recs[i - 1].successes);
  }
  CHECK(recs.front().success_rate == 0.0);
  CHECK(run_sweep(cfg) == recs);
  CHECK(serial::run_sweep(VarietyModel::cayley_menger(8, 2), cfg) == recs);

  auto other = cfg;
  other.base_seed = 6;
  CHECK(run_sweep(other) != recs);
}

TEST_CASE("coupled sweeps share trials across grids") {
  // Trial t does not depend on the other grid points.
  SweepConfig a{"lowrank:m=5,n=5,r=1", {0.3, 0.5, 0.7}, 80, 9};
  SweepConfig b{"lowrank:m=5,n=5,r=1", {0.5}, 80, 9};
  CHECK(run_sweep(a)[1] == run_sweep(b)[0]);
}

TEST_CASE("theoretical rate") {
  const VarietyModel m = VarietyModel::low_rank(30, 30, 2);
  CHECK(theoretical_rate(m, 1, 1) == doctest::Approx(0.8767531028284667).epsilon(1e-12));
  const VarietyModel small = VarietyModel::low_rank(30, 30, 1);
  CHECK(theoretical_rate(small, 2, 1) == doctest::Approx(2 * theoretical_rate(small, 1, 1)));
  CHECK(theoretical_rate(m, 2, 1) == 1.0);
  CHECK(theoretical_rate(small, 1, 1, LogBase::two) == doctest::Approx(59 / 900.0 * std::log2(900.0)));
  CHECK(theoretical_rate(m, 1, 1, LogBase::ten) == doctest::Approx(116 / 900.0 * std::log10(900.0)));
  CHECK_THROWS_AS(theoretical_rate(m, 0.5, 1), std::invalid_argument);
}

TEST_CASE("coupon reference") {
  CHECK(coupon_reference(16, 4, 0.5) == doctest::Approx(0.7724761962890625).epsilon(1e-14));
  CHECK(coupon_reference(16, 4, 0.5) == doctest::Approx(0.77248).epsilon(1e-5));
  CHECK(coupon_reference(16, 4, 0.0) == 0.0);
  CHECK(coupon_reference(16, 4, 1.0) == 1.0);
  CHECK_THROWS_AS(coupon_reference(15, 4, 0.5), std::invalid_argument);
}

TEST_CASE("block flat sweep follows the coupon formula") {
  SweepConfig cfg{"block:n=16,k=4", grid(0.1, 1.0, 0.1), 600, 77};
  const auto recs = run_sweep(cfg);
  for (const SweepRecord& r : recs) {
    const double ref = coupon_reference(16, 4, r.rho);
    // 99.9% Wilson interval keeps this deterministic test away from the edge.
    const auto [lo, hi] = wilson_interval(r.successes, r.trials, 3.2905267314919255);
    CAPTURE(r.rho);
    CHECK(ref >= lo);
    CHECK(ref <= hi);
  }
}

TEST_CASE("threshold estimate") {
  std::vector<SweepRecord> recs{make_record(0.1, 10, 0), make_record(0.2, 10, 2), make_record(0.3, 10, 6),
                                make_record(0.4, 10, 10)};
  const ThresholdEstimate t = estimate_threshold(recs);
  CHECK(t.bracketed);
  CHECK(t.rho_half == doctest::Approx(0.275));

  const ThresholdEstimate hi = estimate_threshold({make_record(0.2, 10, 7), make_record(0.4, 10, 10)});
  CHECK_FALSE(hi.bracketed);
  CHECK(hi.rho_half == 0.2);
  const ThresholdEstimate lo = estimate_threshold({make_record(0.2, 10, 0), make_record(0.4, 10, 3)});
  CHECK_FALSE(lo.bracketed);
  CHECK(lo.rho_half == 0.4);
  CHECK_THROWS_AS(estimate_threshold({}), std::invalid_argument);
}

TEST_CASE("Rudelson probe") {
  const Flat f = max_incoherent_flat(64, 5);
  const std::vector<double> g{0.2, 0.4, 0.6, 0.8, 1.0};
  const auto rows = rudelson_probe(f, g, 100, 3);
  REQUIRE(rows.size() == g.size());
  CHECK(rows.back().mean_norm == doctest::Approx(0.0).epsilon(1e-12));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].max_leverage == doctest::Approx(5.0 / 64));
    CHECK(rows[i].bound_shape == doctest::Approx(std::sqrt(std::log(64.0) / g[i] * 5.0 / 64)));
    if (i > 0) CHECK(rows[i].mean_norm < rows[i - 1].mean_norm);
  }
  CHECK(rudelson_probe(f, g, 100, 3)[1].mean_norm == rows[1].mean_norm);
  CHECK_THROWS_AS(rudelson_probe(f, {0.0}, 10, 1), std::invalid_argument);
}

TEST_CASE("rigidity oracles agree on small graphs") {
  for (int n = 3; n <= 5; ++n) {
    const OracleComparison c = compare_rigidity_oracles(n, 11);
    CHECK(c.graphs == (1L << (n * (n - 1) / 2)));
    CHECK(c.disagreements == 0);
    CHECK(c.disagreeing_masks.empty());
    const OracleComparison s = serial::compare_rigidity_oracles(n, 11);
    CHECK(s.rigid == c.rigid);
    CHECK(s.disagreements == c.disagreements);
  }
  // K4 and its six single-edge deletions.
  CHECK(compare_rigidity_oracles(4, 2).rigid == 7);
  CHECK(compare_rigidity_oracles(3, 2).rigid == 1);
  CHECK_THROWS_AS(compare_rigidity_oracles(2, 1), std::invalid_argument);
}

TEST_CASE("threshold sits between coherence and the sampling-rate envelope") {
  // The distance models are left out: their coh is only an envelope (see README).
  std::vector<double> g = grid(0.02, 0.5, 0.02);
  g.push_back(1.0);
  for (const char* descriptor : {"lowrank:m=20,n=20,r=1", "symlowrank:n=20,r=2"}) {
    SweepConfig cfg{descriptor, g, 100, 21};
    const auto recs = run_sweep(cfg);
    const VarietyModel model = parse_model(descriptor);
    const double coh = coherence_formula(model).value;
    const ThresholdEstimate t = estimate_threshold(recs);
    CAPTURE(descriptor);
    CHECK(t.bracketed);
    CHECK(t.rho_half >= coh);
    CHECK(t.rho_half <= 6 * coh * std::log(double(model.ambient_dim())));
  }
}
