#include "cohlab/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "cohlab/error.hpp"
#include "cohlab/experiment.hpp"
#include "cohlab/model_parse.hpp"

namespace cohlab::cli {

using json = nlohmann::json;

namespace {

constexpr const char* kCoordinateHelp =
    "Coordinates: matrix models are row-major, entry (i,j) of an m x n matrix is index i*n+j. "
    "symlowrank lists (i<=j) lexicographically; unitgram and cayley list pairs (i<j) lexicographically.";

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ParseError("bad number \"" + tok + "\"");
    }
    if (used != tok.size()) throw ParseError("bad number \"" + tok + "\"");
    out.push_back(v);
  }
  if (out.empty()) throw ParseError("empty list");
  return out;
}

std::vector<Edge> parse_edges(const std::string& text) {
  std::vector<Edge> edges;
  if (text.empty()) return edges;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const std::size_t dash = tok.find('-');
    if (dash == std::string::npos) throw ParseError("edge \"" + tok + "\" is not of the form i-j");
    try {
      std::size_t a = 0, b = 0;
      const int i = std::stoi(tok.substr(0, dash), &a);
      const int j = std::stoi(tok.substr(dash + 1), &b);
      if (a != dash || b != tok.size() - dash - 1) throw ParseError("");
      edges.emplace_back(i, j);
    } catch (const std::exception&) {
      throw ParseError("edge \"" + tok + "\" is not of the form i-j");
    }
  }
  return edges;
}

void require_seed(const std::optional<std::uint64_t>& seed, const std::string& cmd) {
  if (!seed) throw CLI::RequiredError(cmd + " is stochastic and needs --seed");
}

// Reads "key=value" lines ('#' comments) and turns keys that were not given
// explicitly into leading "--key value" tokens, so explicit flags win.
std::vector<std::string> merge_config(const CLI::App& app, const std::vector<std::string>& args) {
  if (args.empty()) return args;
  const CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(args.front());
  } catch (const CLI::OptionNotFound&) {
    return args;
  }
  std::optional<std::string> path;
  std::vector<std::string> rest;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path) return args;

  std::ifstream is(*path);
  if (!is) throw CLI::FileError::Missing(*path);
  std::vector<std::string> merged{args.front()};
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw CLI::ConversionError("config line " + std::to_string(line_no) + ": expected key=value");
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    const std::string flag = "--" + key;
    const CLI::Option* opt = nullptr;
    try {
      opt = sub->get_option(flag);
    } catch (const CLI::OptionNotFound&) {
      throw CLI::ExtrasError("config " + *path + ": unknown key \"" + key + "\"", CLI::ExitCodes::ExtrasError);
    }
    const bool explicit_flag = std::any_of(rest.begin(), rest.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (explicit_flag) continue;
    if (opt->get_type_size() == 0) {
      if (value == "true" || value == "1") merged.push_back(flag);
    } else {
      merged.push_back(flag);
      merged.push_back(value);
    }
  }
  merged.insert(merged.end(), rest.begin(), rest.end());
  return merged;
}

void log_resolved(const CLI::App& sub, std::ostream& err) {
  err << "# resolved " << sub.get_name() << " config\n";
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_name() == "--help" || opt->get_name() == "--config") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : " ") + r;
      if (opt->get_type_size() == 0 && value.empty()) value = "true";
    } else {
      value = opt->get_default_str();
      if (value.empty()) value = opt->get_type_size() == 0 ? "false" : "(unset)";
    }
    std::string name = opt->get_name();
    if (name.rfind("--", 0) == 0) name = name.substr(2);
    err << "#   " << name << '=' << value << '\n';
  }
}

void apply_thread_cap(std::ostream& err) {
  const char* env = std::getenv("COHLAB_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 0) {
    err << "warning: ignoring COHLAB_THREADS=" << env << '\n';
    return;
  }
  if (n > 0) omp_set_num_threads(static_cast<int>(n));
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

std::vector<double> parse_rho_grid(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_list(text);
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(parse_list(tok).at(0));
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
    throw ParseError("rho grid range must be a:b:step with a <= b and step > 0");
  std::vector<double> grid;
  for (long i = 0;; ++i) {
    const double v = parts[0] + static_cast<double>(i) * parts[2];
    if (v > parts[1] + 1e-9 * parts[2]) break;
    grid.push_back(std::round(v * 1e12) / 1e12);
  }
  return grid;
}

int dispatch(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cohlab: coherence, identifiability and sampling-rate experiments"};
  app.require_subcommand(1);
  app.footer(kCoordinateHelp);

  // coherence
  auto* coh = app.add_subcommand("coherence", "Coherence of a model: closed form, at a generic point, or a Monte Carlo infimum");
  std::string coh_model;
  bool coh_formula = false, coh_leverage = false;
  std::optional<std::uint64_t> coh_seed;
  long coh_samples = 1;
  coh->add_option("--model", coh_model, "Model descriptor, e.g. lowrank:m=3,n=3,r=1")->required();
  coh->add_flag("--formula", coh_formula, "Report the closed-form value (exact) or envelope");
  coh->add_option("--seed", coh_seed, "Seed for generic points");
  coh->add_option("--samples", coh_samples, "Generic points for the Monte Carlo infimum")->capture_default_str()->check(CLI::PositiveNumber);
  coh->add_flag("--leverage", coh_leverage, "Include the leverage scores of the (tangent) flat");

  // identify
  auto* idf = app.add_subcommand("identify", "Generic finite identifiability from a coordinate mask or Gaussian measurements");
  std::string idf_model, idf_mask;
  std::optional<double> idf_rho;
  std::optional<int> idf_meas;
  std::optional<std::uint64_t> idf_seed;
  double idf_tol = kDefaultRankTol;
  idf->add_option("--model", idf_model, "Model descriptor")->required();
  auto* mask_opt = idf->add_option("--mask", idf_mask, "Observed coordinate indices, e.g. 0,3,7");
  auto* rho_opt = idf->add_option("--rho", idf_rho, "Draw a Bernoulli mask at this rate")->check(CLI::Range(0.0, 1.0));
  auto* meas_opt = idf->add_option("--measurements", idf_meas, "Use this many generic linear measurements instead of a mask")
                       ->check(CLI::PositiveNumber);
  mask_opt->excludes(rho_opt)->excludes(meas_opt);
  rho_opt->excludes(meas_opt);
  idf->add_option("--seed", idf_seed, "Seed for the generic point (and mask / measurements)");
  idf->add_option("--tol", idf_tol, "Relative singular value cutoff")->capture_default_str();

  // sweep
  auto* swp = app.add_subcommand("sweep", "Monte Carlo phase-transition sweep written as CSV");
  SweepConfig sweep_cfg;
  std::string grid_text, sweep_out;
  std::optional<std::uint64_t> sweep_seed;
  swp->add_option("--model", sweep_cfg.model, "Model descriptor")->required();
  swp->add_option("--rho-grid", grid_text, "a:b:step or comma list")->required();
  swp->add_option("--trials", sweep_cfg.trials, "Trials per rho")->required()->check(CLI::PositiveNumber);
  swp->add_option("--seed", sweep_seed, "Base seed");
  swp->add_option("--tol", sweep_cfg.tol, "Relative singular value cutoff")->capture_default_str();
  swp->add_option("--lambda", sweep_cfg.lambda, "Confidence parameter recorded with the theoretical rate")->capture_default_str();
  swp->add_option("--out", sweep_out, "Output CSV path (standard output when omitted)");

  // frame
  auto* frm = app.add_subcommand("frame", "Write a maximally incoherent flat");
  int frame_n = 0, frame_k = 0;
  bool frame_harmonic = false;
  std::string frame_out;
  frm->add_option("--n", frame_n, "Ambient dimension")->required()->check(CLI::PositiveNumber);
  frm->add_option("--k", frame_k, "Flat dimension")->required()->check(CLI::PositiveNumber);
  frm->add_flag("--harmonic", frame_harmonic, "Use the harmonic frame even when k divides n");
  frm->add_option("--out", frame_out, "Output flat file (standard output when omitted)");

  // tangent-limit
  auto* tl = app.add_subcommand("tangent-limit", "Grassmann distance between distance-matrix and lifted Gram tangents");
  int tl_n = 6, tl_d = 2;
  std::string tl_h = "10,31.6,100,316";
  std::optional<std::uint64_t> tl_seed;
  tl->add_option("--n", tl_n, "Number of points")->capture_default_str();
  tl->add_option("--d", tl_d, "Point dimension")->capture_default_str();
  tl->add_option("--h-values", tl_h, "Comma list of lift heights")->capture_default_str();
  tl->add_option("--seed", tl_seed, "Seed for the configuration");

  // rudelson
  auto* rud = app.add_subcommand("rudelson", "Mean contraction norm of Bernoulli sampling on a flat");
  std::string rud_flat, rud_grid = "0.1:1:0.1";
  int rud_n = 0, rud_k = 0, rud_trials = 50;
  std::optional<std::uint64_t> rud_seed;
  auto* rud_flat_opt = rud->add_option("--flat", rud_flat, "Flat file");
  auto* rud_n_opt = rud->add_option("--n", rud_n, "Ambient dimension of a maximally incoherent flat");
  rud->add_option("--k", rud_k, "Dimension of the maximally incoherent flat");
  rud_flat_opt->excludes(rud_n_opt);
  rud->add_option("--rho-grid", rud_grid, "a:b:step or comma list")->capture_default_str();
  rud->add_option("--trials", rud_trials, "Masks per rho")->capture_default_str()->check(CLI::PositiveNumber);
  rud->add_option("--seed", rud_seed, "Seed");

  // rigidity-oracle
  auto* rig = app.add_subcommand("rigidity-oracle", "Exhaustive planar Laman test for a graph on at most 7 vertices");
  int rig_n = 0;
  std::string rig_edges;
  rig->add_option("--n", rig_n, "Vertex count")->required();
  rig->add_option("--edges", rig_edges, "Edges, e.g. 0-1,1-2,0-2")->required();

  std::vector<std::string> args;
  try {
    args = merge_config(app, raw_args);
    for (CLI::App* sub : app.get_subcommands({}))
      sub->add_option("--config", "File of key=value lines; explicit flags take precedence");
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  apply_thread_cap(err);
  CLI::App* active = app.get_subcommands().front();
  log_resolved(*active, err);

  try {
    if (active == coh) {
      const VarietyModel model = parse_model(coh_model);
      json j;
      j["model"] = coh_model;
      std::optional<Flat> flat_for_leverage;
      if (coh_formula) {
        const CoherenceValue v = coherence_formula(model);
        j["value"] = v.value;
        j["exact"] = v.exact;
        if (const auto* lin = std::get_if<LinearKind>(&model.kind())) flat_for_leverage = *lin->flat;
      } else if (const auto* lin = std::get_if<LinearKind>(&model.kind())) {
        j["value"] = coherence_of_flat(*lin->flat);
        j["exact"] = true;
        flat_for_leverage = *lin->flat;
      } else {
        require_seed(coh_seed, "coherence without --formula");
        Rng rng(*coh_seed);
        double best = std::numeric_limits<double>::infinity();
        for (long s = 0; s < coh_samples; ++s) {
          GenericSample g = sample_generic_tangent(model, rng);
          const double c = coherence_of_flat(g.tangent.flat);
          if (c < best) {
            best = c;
            flat_for_leverage = g.tangent.flat;
          }
        }
        j["value"] = best;
        j["exact"] = false;
        j["samples"] = coh_samples;
      }
      if (coh_leverage) {
        if (!flat_for_leverage) throw std::invalid_argument("--leverage needs a linear model or a generic point");
        const Vector lev = leverage_scores(*flat_for_leverage);
        j["leverage"] = std::vector<double>(lev.begin(), lev.end());
      }
      out << j.dump() << '\n';
      return kExitOk;
    }

    if (active == idf) {
      require_seed(idf_seed, "identify");
      const VarietyModel model = parse_model(idf_model);
      const Rng root(*idf_seed);
      Rng point_rng = root.split(1);
      const GenericSample g = sample_generic_tangent(model, point_rng);
      IdentifyVerdict v{};
      json j;
      if (idf_meas) {
        Rng meas_rng = root.split(3);
        v = identifiable_linear(g.tangent, generic_linear_map(model.ambient_dim(), *idf_meas, meas_rng), idf_tol);
        j["measurements"] = *idf_meas;
      } else {
        SampleMask mask = SampleMask::full(model.ambient_dim());
        if (idf_rho) {
          Rng mask_rng = root.split(2);
          mask = draw_mask(model.ambient_dim(), *idf_rho, mask_rng);
        } else if (mask_opt->count() > 0) {
          mask = parse_mask(idf_mask, model.ambient_dim());
        }
        v = identifiable_mask(g.tangent, mask, idf_tol);
        j["mask"] = mask.indices();
        j["measurements"] = mask.size();
        if (idf_rho && *idf_rho > 0.0) j["contraction_norm"] = contraction_norm(g.tangent.flat, mask, *idf_rho);
      }
      j["identifiable"] = v.identifiable;
      j["tangent_dim"] = v.tangent_dim;
      j["projected_rank"] = v.projected_rank;
      j["smallest_retained_singular_value"] = v.smallest_retained_singular_value;
      j["tolerance_used"] = v.tolerance_used;
      j["model"] = idf_model;
      out << j.dump() << '\n';
      return kExitOk;
    }

    if (active == swp) {
      require_seed(sweep_seed, "sweep");
      sweep_cfg.base_seed = *sweep_seed;
      sweep_cfg.rho_grid = parse_rho_grid(grid_text);
      const VarietyModel model = parse_model(sweep_cfg.model);
      SweepTable table{sweep_metadata(model, sweep_cfg), run_sweep(model, sweep_cfg)};
      const ThresholdEstimate th = estimate_threshold(table.records);
      table.metadata.emplace_back("rho_half", format_real(th.rho_half));
      table.metadata.emplace_back("rho_half_bracketed", th.bracketed ? "true" : "false");
      table.metadata.emplace_back("rho_half_method", th.method);
      if (sweep_out.empty()) {
        write_csv(out, table);
      } else {
        write_csv(sweep_out, table);
        err << "wrote " << table.records.size() << " rows to " << sweep_out << '\n';
      }
      return kExitOk;
    }

    if (active == frm) {
      if (frame_k > frame_n) throw std::invalid_argument("frame: need k <= n");
      const Flat flat = frame_harmonic ? harmonic_frame_flat(frame_n, frame_k) : max_incoherent_flat(frame_n, frame_k);
      err << "# coherence=" << format_real(coherence_of_flat(flat)) << '\n';
      if (frame_out.empty()) {
        write_flat(out, flat);
      } else {
        save_flat(frame_out, flat);
      }
      return kExitOk;
    }

    if (active == tl) {
      require_seed(tl_seed, "tangent-limit");
      const std::vector<double> hs = parse_list(tl_h);
      Rng rng(*tl_seed);
      Matrix config(tl_n, tl_d);
      for (int i = 0; i < tl_n; ++i)
        for (int c = 0; c < tl_d; ++c) config(i, c) = rng.normal();
      const std::vector<double> dist = tangent_limit_probe(config, hs);
      out << "h,distance\n";
      for (std::size_t i = 0; i < hs.size(); ++i) out << format_real(hs[i]) << ',' << format_real(dist[i]) << '\n';
      if (hs.size() >= 2 && std::all_of(dist.begin(), dist.end(), [](double d) { return d > 0.0; }))
        err << "# log-log slope=" << format_real(fitted_slope(hs, dist)) << '\n';
      return kExitOk;
    }

    if (active == rud) {
      require_seed(rud_seed, "rudelson");
      std::optional<Flat> flat;
      if (!rud_flat.empty()) {
        flat = load_flat(rud_flat);
      } else {
        if (rud_n < 1 || rud_k < 1) throw CLI::RequiredError("rudelson needs --flat or both --n and --k");
        flat = max_incoherent_flat(rud_n, rud_k);
      }
      const auto rows = rudelson_probe(*flat, parse_rho_grid(rud_grid), rud_trials, *rud_seed);
      out << "rho,mean_norm,max_leverage,bound_shape\n";
      for (const RudelsonRow& r : rows)
        out << format_real(r.rho) << ',' << format_real(r.mean_norm) << ',' << format_real(r.max_leverage) << ','
            << format_real(r.bound_shape) << '\n';
      return kExitOk;
    }

    if (active == rig) {
      out << (laman_brute_oracle(rig_n, parse_edges(rig_edges)) ? "true" : "false") << '\n';
      return kExitOk;
    }
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << active->help();
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace cohlab::cli
