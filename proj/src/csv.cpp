#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cohlab/error.hpp"
#include "cohlab/experiment.hpp"

namespace cohlab {

std::string format_real(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("format_real: conversion failed");
  return std::string(buf, end);
}

Metadata sweep_metadata(const VarietyModel& model, const SweepConfig& config) {
  std::string grid;
  for (std::size_t i = 0; i < config.rho_grid.size(); ++i) grid += (i ? "," : "") + format_real(config.rho_grid[i]);

  Metadata md{
      {"format", "cohlab-sweep/1"},
      {"cohlab_version", COHLAB_VERSION},
      {"model", config.model.empty() ? model.describe() : config.model},
      {"base_seed", std::to_string(config.base_seed)},
      {"trials", std::to_string(config.trials)},
      {"tol", format_real(config.tol)},
      {"lambda", format_real(config.lambda)},
      {"rho_grid", grid},
      {"rng", std::string(Rng::kName)},
      {"seed_derivation", "trial t uses derive_seed(base_seed, t); point stream split(1), mask uniforms split(2)"},
      {"ambient_dim", std::to_string(model.ambient_dim())},
      {"dimension", std::to_string(dimension(model))},
  };
  if (!std::holds_alternative<MinkowskiSumKind>(model.kind())) {
    const CoherenceValue coh = coherence_formula(model);
    md.emplace_back("coherence", format_real(coh.value));
    md.emplace_back("coherence_exact", coh.exact ? "true" : "false");
    md.emplace_back("theoretical_rate", format_real(theoretical_rate(model, config.lambda, 1.0)));
    md.emplace_back("theoretical_rate_c", "1");
  }
  md.emplace_back("dim_over_ambient",
                  format_real(static_cast<double>(dimension(model)) / model.ambient_dim()));
  return md;
}

void write_csv(std::ostream& os, const SweepTable& table) {
  for (const auto& [key, value] : table.metadata) os << "# " << key << '=' << value << '\n';
  os << kCsvHeader << '\n';
  for (const SweepRecord& r : table.records)
    os << format_real(r.rho) << ',' << r.trials << ',' << r.successes << ',' << format_real(r.success_rate) << ','
       << format_real(r.ci_low) << ',' << format_real(r.ci_high) << '\n';
}

namespace {

template <class T>
T parse_field(std::string_view tok, int line_no, const char* what) {
  T value{};
  auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (tok.empty() || ec != std::errc() || end != tok.data() + tok.size())
    throw ParseError("csv line " + std::to_string(line_no) + ": bad " + what + " \"" + std::string(tok) + "\"");
  return value;
}

}  // namespace

SweepTable read_csv(std::istream& is) {
  SweepTable table;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (header_seen) throw ParseError("csv line " + std::to_string(line_no) + ": metadata after the header");
      std::string_view body(line);
      body.remove_prefix(1);
      if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      const std::size_t eq = body.find('=');
      if (eq == std::string_view::npos) throw ParseError("csv line " + std::to_string(line_no) + ": metadata needs key=value");
      table.metadata.emplace_back(std::string(body.substr(0, eq)), std::string(body.substr(eq + 1)));
      continue;
    }
    if (!header_seen) {
      if (line != kCsvHeader) throw ParseError("csv line " + std::to_string(line_no) + ": expected header \"" + kCsvHeader + "\"");
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> cols;
    std::string_view rest(line);
    for (std::size_t comma; (comma = rest.find(',')) != std::string_view::npos; rest.remove_prefix(comma + 1))
      cols.push_back(rest.substr(0, comma));
    cols.push_back(rest);
    if (cols.size() != 6) throw ParseError("csv line " + std::to_string(line_no) + ": expected 6 columns");

    SweepRecord r{};
    r.rho = parse_field<double>(cols[0], line_no, "rho");
    r.trials = parse_field<int>(cols[1], line_no, "trials");
    r.successes = parse_field<int>(cols[2], line_no, "successes");
    r.success_rate = parse_field<double>(cols[3], line_no, "success_rate");
    r.ci_low = parse_field<double>(cols[4], line_no, "ci_low");
    r.ci_high = parse_field<double>(cols[5], line_no, "ci_high");
    const std::string where = "csv line " + std::to_string(line_no) + ": ";
    if (r.trials < 1) throw ParseError(where + "trials must be positive");
    if (r.successes < 0 || r.successes > r.trials) throw ParseError(where + "successes must lie in [0, trials]");
    if (r.success_rate != static_cast<double>(r.successes) / r.trials)
      throw ParseError(where + "success_rate differs from successes / trials");
    if (!(r.ci_low <= r.success_rate && r.success_rate <= r.ci_high)) throw ParseError(where + "interval does not contain the rate");
    table.records.push_back(r);
  }
  if (!header_seen) throw ParseError("csv: missing header line");
  return table;
}

void write_csv(const std::string& path, const SweepTable& table) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(os, table);
}

SweepTable read_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open " + path);
  return read_csv(is);
}

}  // namespace cohlab
