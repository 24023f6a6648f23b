#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cohlab/identify.hpp"
#include "cohlab/laman.hpp"
#include "cohlab/variety.hpp"

namespace cohlab {

struct SweepConfig {
  std::string model;
  std::vector<double> rho_grid;  // increasing, in (0, 1]
  int trials = 1;
  std::uint64_t base_seed = 0;
  double tol = kDefaultRankTol;
  double lambda = 1.0;  // reported with the theoretical rate; does not change the sweep
};

/// Throws std::invalid_argument unless the grid is nonempty, strictly
/// increasing, inside (0, 1], trials >= 1, tol > 0 and lambda >= 1.
void validate(const SweepConfig& config);

struct SweepRecord {
  double rho;
  int trials;
  int successes;
  double success_rate;
  double ci_low, ci_high;  // 95% Wilson interval

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

/// Wilson score interval at the given normal quantile.
std::pair<double, double> wilson_interval(int successes, int trials, double z = 1.959963984540054);

SweepRecord make_record(double rho, int trials, int successes);

/// Phase-transition sweep. Trial t draws a generic point and one uniform per
/// coordinate from generators keyed by (base_seed, t), shared by every rho, so
/// the masks of one trial are nested along the grid. A trial succeeds when the
/// point is identifiable from its mask. Trials run in parallel; results are
/// reduced in (rho, trial) order, so output does not depend on scheduling.
std::vector<SweepRecord> run_sweep(const SweepConfig& config);
std::vector<SweepRecord> run_sweep(const VarietyModel& model, const SweepConfig& config);

struct ThresholdEstimate {
  double rho_half;
  bool bracketed;
  std::string method = "linear interpolation between bracketing grid points";
};

/// First 50% crossing of the success rate. When the grid does not bracket
/// it, rho_half is the nearest grid end and `bracketed` is false.
ThresholdEstimate estimate_threshold(const std::vector<SweepRecord>& records);

enum class LogBase { natural, two, ten };

/// min(1, c * lambda * coh * log(ambient_dim)), with coh from
/// coherence_formula. Throws std::invalid_argument for models without one.
double theoretical_rate(const VarietyModel& model, double lambda, double c, LogBase base = LogBase::natural);

/// (1 - (1 - rho)^(n/k))^k: the probability that every block of the block
/// flat gets at least one observed coordinate. Requires k | n.
double coupon_reference(int n, int k, double rho);

struct RudelsonRow {
  double rho;
  double mean_norm;
  double max_leverage;
  /// sqrt(log n / rho) * sqrt(max_leverage)
  double bound_shape;
};

/// Mean contraction_norm of the flat over `trials` Bernoulli masks per rho.
/// Masks of one trial are nested along the grid.
std::vector<RudelsonRow> rudelson_probe(const Flat& flat, const std::vector<double>& rho_grid, int trials,
                                        std::uint64_t seed);

struct OracleComparison {
  long graphs = 0;
  long rigid = 0;
  long disagreements = 0;
  std::vector<std::uint32_t> disagreeing_masks;
};

/// Runs identifiable_mask on CayleyMenger(n, 2) at one generic configuration
/// against laman_brute_oracle for every edge set on n vertices.
OracleComparison compare_rigidity_oracles(int n, std::uint64_t seed, double tol = kDefaultRankTol);

// CSV: "# key=value" metadata lines, then the header
//   rho,trials,successes,success_rate,ci_low,ci_high
// and one row per record. Reals are written in shortest round-trip form.
using Metadata = std::vector<std::pair<std::string, std::string>>;

struct SweepTable {
  Metadata metadata;
  std::vector<SweepRecord> records;
};

inline constexpr const char* kCsvHeader = "rho,trials,successes,success_rate,ci_low,ci_high";

/// Metadata block recorded with every sweep: config, RNG, version, and the
/// model's coherence and theoretical rate when it has a formula.
Metadata sweep_metadata(const VarietyModel& model, const SweepConfig& config);

void write_csv(std::ostream& os, const SweepTable& table);
/// Throws ParseError, naming the line, on malformed rows, a missing header,
/// successes > trials, or a success_rate inconsistent with the counts.
SweepTable read_csv(std::istream& is);
void write_csv(const std::string& path, const SweepTable& table);
SweepTable read_csv(const std::string& path);

std::string format_real(double x);

namespace serial {
/// Single-threaded reference for cohlab::run_sweep.
std::vector<SweepRecord> run_sweep(const VarietyModel& model, const SweepConfig& config);
/// Single-threaded reference for cohlab::compare_rigidity_oracles.
OracleComparison compare_rigidity_oracles(int n, std::uint64_t seed, double tol = kDefaultRankTol);
}  // namespace serial

}  // namespace cohlab
