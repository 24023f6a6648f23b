#include "cohlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include "cohlab/error.hpp"
#include "cohlab/model_parse.hpp"

namespace cohlab {

void validate(const SweepConfig& config) {
  if (config.rho_grid.empty()) throw std::invalid_argument("sweep: empty rho grid");
  for (std::size_t i = 0; i < config.rho_grid.size(); ++i) {
    const double rho = config.rho_grid[i];
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("sweep: rho values must lie in (0, 1]");
    if (i > 0 && !(rho > config.rho_grid[i - 1])) throw std::invalid_argument("sweep: rho grid must be increasing");
  }
  if (config.trials < 1) throw std::invalid_argument("sweep: need at least one trial");
  if (!(config.tol > 0.0)) throw std::invalid_argument("sweep: tol must be positive");
  if (!(config.lambda >= 1.0)) throw std::invalid_argument("sweep: lambda must be >= 1");
}

std::pair<double, double> wilson_interval(int successes, int trials, double z) {
  if (trials <= 0) throw std::invalid_argument("wilson_interval: need trials > 0");
  const double n = trials;
  const double p = successes / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // The endpoints at p = 0 and p = 1 are exact; the formula leaves rounding residue there.
  const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

SweepRecord make_record(double rho, int trials, int successes) {
  const auto [lo, hi] = wilson_interval(successes, trials);
  return SweepRecord{rho, trials, successes, static_cast<double>(successes) / trials, lo, hi};
}

namespace {

// Trial t of a sweep: one generic point and one uniform per coordinate, both
// keyed by (base_seed, t). outcome[i] is the verdict at rho_grid[i].
void run_trial(const VarietyModel& model, const SweepConfig& config, int t, std::vector<std::uint8_t>& outcomes) {
  const Rng trial(derive_seed({config.base_seed, static_cast<std::uint64_t>(t)}));
  Rng point_rng = trial.split(1);
  Rng mask_rng = trial.split(2);
  const GenericSample sample = sample_generic_tangent(model, point_rng);
  const std::vector<double> u = coordinate_uniforms(model.ambient_dim(), mask_rng);
  const std::size_t trials = static_cast<std::size_t>(config.trials);
  for (std::size_t i = 0; i < config.rho_grid.size(); ++i) {
    const SampleMask mask = mask_from_uniforms(u, config.rho_grid[i]);
    // Fewer observations than dimensions cannot have full rank; skip the SVD.
    const bool ok = mask.size() >= sample.tangent.expected_dim &&
                    identifiable_mask(sample.tangent, mask, config.tol).identifiable;
    outcomes[i * trials + static_cast<std::size_t>(t)] = ok ? 1 : 0;
  }
}

std::vector<SweepRecord> reduce_outcomes(const SweepConfig& config, const std::vector<std::uint8_t>& outcomes) {
  std::vector<SweepRecord> records;
  const std::size_t trials = static_cast<std::size_t>(config.trials);
  for (std::size_t i = 0; i < config.rho_grid.size(); ++i) {
    const auto first = outcomes.begin() + static_cast<std::ptrdiff_t>(i * trials);
    const int successes = std::accumulate(first, first + static_cast<std::ptrdiff_t>(trials), 0);
    records.push_back(make_record(config.rho_grid[i], config.trials, successes));
  }
  return records;
}

// Runs body(i) for i in [0, count) across OpenMP threads and rethrows the
// first exception on the calling thread.
template <class Body>
void parallel_for(long count, Body&& body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(cohlab_parallel_for_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<SweepRecord> run_sweep(const VarietyModel& model, const SweepConfig& config) {
  validate(config);
  std::vector<std::uint8_t> outcomes(config.rho_grid.size() * static_cast<std::size_t>(config.trials), 0);
  parallel_for(config.trials, [&](long t) { run_trial(model, config, static_cast<int>(t), outcomes); });
  return reduce_outcomes(config, outcomes);
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config) {
  return run_sweep(parse_model(config.model), config);
}

namespace serial {
std::vector<SweepRecord> run_sweep(const VarietyModel& model, const SweepConfig& config) {
  validate(config);
  std::vector<std::uint8_t> outcomes(config.rho_grid.size() * static_cast<std::size_t>(config.trials), 0);
  for (int t = 0; t < config.trials; ++t) run_trial(model, config, t, outcomes);
  return reduce_outcomes(config, outcomes);
}
}  // namespace serial

ThresholdEstimate estimate_threshold(const std::vector<SweepRecord>& records) {
  if (records.empty()) throw std::invalid_argument("estimate_threshold: no records");
  if (records.front().success_rate >= 0.5) return ThresholdEstimate{records.front().rho, false};
  for (std::size_t i = 1; i < records.size(); ++i) {
    const SweepRecord& lo = records[i - 1];
    const SweepRecord& hi = records[i];
    if (lo.success_rate < 0.5 && hi.success_rate >= 0.5) {
      const double frac = (0.5 - lo.success_rate) / (hi.success_rate - lo.success_rate);
      return ThresholdEstimate{lo.rho + frac * (hi.rho - lo.rho), true};
    }
  }
  return ThresholdEstimate{records.back().rho, false};
}

double theoretical_rate(const VarietyModel& model, double lambda, double c, LogBase base) {
  if (!(lambda >= 1.0)) throw std::invalid_argument("theoretical_rate: lambda must be >= 1");
  const double coh = coherence_formula(model).value;
  const double n = model.ambient_dim();
  double log_n = std::log(n);
  if (base == LogBase::two) log_n = std::log2(n);
  if (base == LogBase::ten) log_n = std::log10(n);
  return std::min(1.0, c * lambda * coh * log_n);
}

double coupon_reference(int n, int k, double rho) {
  if (k < 1 || n < 1 || n % k != 0) throw std::invalid_argument("coupon_reference: need k | n");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("coupon_reference: rho must lie in [0, 1]");
  const double block_hit = 1.0 - std::pow(1.0 - rho, n / k);
  return std::pow(block_hit, k);
}

std::vector<RudelsonRow> rudelson_probe(const Flat& flat, const std::vector<double>& rho_grid, int trials,
                                        std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("rudelson_probe: need at least one trial");
  for (double rho : rho_grid)
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("rudelson_probe: rho values must lie in (0, 1]");
  const std::size_t g = rho_grid.size();
  std::vector<double> norms(g * static_cast<std::size_t>(trials));
  parallel_for(trials, [&](long t) {
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(t)}));
    const std::vector<double> u = coordinate_uniforms(flat.ambient_dim(), rng);
    for (std::size_t i = 0; i < g; ++i)
      norms[i * static_cast<std::size_t>(trials) + static_cast<std::size_t>(t)] =
          contraction_norm(flat, mask_from_uniforms(u, rho_grid[i]), rho_grid[i]);
  });

  const double max_lev = coherence_of_flat(flat);
  const double log_n = std::log(static_cast<double>(flat.ambient_dim()));
  std::vector<RudelsonRow> rows;
  for (std::size_t i = 0; i < g; ++i) {
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) sum += norms[i * static_cast<std::size_t>(trials) + static_cast<std::size_t>(t)];
    rows.push_back(RudelsonRow{rho_grid[i], sum / trials, max_lev, std::sqrt(log_n / rho_grid[i]) * std::sqrt(max_lev)});
  }
  return rows;
}

namespace {

struct RigidityCase {
  TangentSpace tangent;
  int edges;
};

RigidityCase rigidity_case(int n, std::uint64_t seed) {
  if (n < 3 || n > kLamanMaxVertices) throw std::invalid_argument("compare_rigidity_oracles: need 3 <= n <= 7");
  Rng rng(seed);
  GenericSample sample = sample_generic_tangent(VarietyModel::cayley_menger(n, 2), rng);
  return RigidityCase{std::move(sample.tangent), n * (n - 1) / 2};
}

SampleMask mask_from_bits(int edges, std::uint32_t bits) {
  std::vector<int> idx;
  for (int e = 0; e < edges; ++e)
    if (bits >> e & 1u) idx.push_back(e);
  return SampleMask(edges, std::move(idx));
}

}  // namespace

OracleComparison compare_rigidity_oracles(int n, std::uint64_t seed, double tol) {
  const RigidityCase rc = rigidity_case(n, seed);
  laman_bases(n);  // build the table before the parallel region
  const long graphs = 1L << rc.edges;
  std::vector<std::uint8_t> rank_rigid(static_cast<std::size_t>(graphs)), laman_rigid(static_cast<std::size_t>(graphs));
  parallel_for(graphs, [&](long g) {
    const auto bits = static_cast<std::uint32_t>(g);
    rank_rigid[static_cast<std::size_t>(g)] = identifiable_mask(rc.tangent, mask_from_bits(rc.edges, bits), tol).identifiable;
    laman_rigid[static_cast<std::size_t>(g)] = laman_brute_oracle(n, bits);
  });
  OracleComparison out;
  out.graphs = graphs;
  for (long g = 0; g < graphs; ++g) {
    out.rigid += laman_rigid[static_cast<std::size_t>(g)];
    if (rank_rigid[static_cast<std::size_t>(g)] != laman_rigid[static_cast<std::size_t>(g)]) {
      ++out.disagreements;
      out.disagreeing_masks.push_back(static_cast<std::uint32_t>(g));
    }
  }
  return out;
}

namespace serial {
OracleComparison compare_rigidity_oracles(int n, std::uint64_t seed, double tol) {
  const RigidityCase rc = rigidity_case(n, seed);
  OracleComparison out;
  out.graphs = 1L << rc.edges;
  for (long g = 0; g < out.graphs; ++g) {
    const auto bits = static_cast<std::uint32_t>(g);
    const bool by_rank = identifiable_mask(rc.tangent, mask_from_bits(rc.edges, bits), tol).identifiable;
    const bool by_count = laman_brute_oracle(n, bits);
    out.rigid += by_count;
    if (by_rank != by_count) {
      ++out.disagreements;
      out.disagreeing_masks.push_back(bits);
    }
  }
  return out;
}
}  // namespace serial

}  // namespace cohlab
