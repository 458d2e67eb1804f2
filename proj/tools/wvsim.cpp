// wvsim: simulation front end for probe-controlled weak-value measurement,
// diagram rewriting, and direct wavefunction measurement.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "config_util.hpp"
#include "wvsim/diagram.hpp"
#include "wvsim/errors.hpp"
#include "wvsim/framework.hpp"
#include "wvsim/protocols.hpp"
#include "wvsim/report_io.hpp"
#include "wvsim/sampling.hpp"
#include "wvsim/wavefunction.hpp"

namespace {

using cli::ConfigError;
using nlohmann::json;
namespace fs = std::filesystem;

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;
  bool force_exact = false;
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("config is not valid JSON: ") + e.what());
  }
}

wvsim::Ket parse_ket(const json& v, const std::string& path) {
  return wvsim::Ket(cli::as_amplitudes(v, path)).normalized();
}

// boundary: {"preset": "anomalous"} or {"psi_i": [...], "psi_f": [...]}
std::pair<wvsim::Ket, wvsim::Ket> parse_boundary(const json& b) {
  cli::check_keys(b, "boundary", {"preset", "psi_i", "psi_f"});
  if (b.contains("preset")) {
    const std::string name = cli::as_string(b.at("preset"), "boundary.preset");
    if (name == "anomalous") {
      const wvsim::ProtocolSpec spec = wvsim::anomalous_benchmark(wvsim::ModifiedWeak{1.0});
      return {spec.psi_i, spec.psi_f};
    }
    if (name == "plus_to_zero") return {wvsim::ket_plus(), wvsim::ket0()};
    throw ConfigError("boundary.preset", "unknown boundary preset '" + name + "'");
  }
  return {parse_ket(cli::require(b, "boundary", "psi_i"), "boundary.psi_i"),
          parse_ket(cli::require(b, "boundary", "psi_f"), "boundary.psi_f")};
}

wvsim::Operator parse_observable(const json& p, const std::string& path, std::size_t dim_hint) {
  const json& v = p.at("observable");
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    if (name == "sigma_x") return wvsim::pauli_x();
    if (name == "sigma_y") return wvsim::pauli_y();
    if (name == "sigma_z") return wvsim::pauli_z();
    if (name == "identity") return wvsim::Operator::identity(dim_hint);
    throw ConfigError(path, "unknown observable '" + name + "'");
  }
  return cli::as_matrix(v, path);
}

wvsim::PauliAxis parse_axis(const json& v, const std::string& path) {
  const std::string axis = cli::as_string(v, path);
  if (axis == "x") return wvsim::PauliAxis::X;
  if (axis == "y") return wvsim::PauliAxis::Y;
  if (axis == "z") return wvsim::PauliAxis::Z;
  throw ConfigError(path, "axis must be one of x, y, z");
}

double require_xi(const json& p) {
  return cli::as_double(cli::require(p, "protocol", "xi"), "protocol.xi");
}

wvsim::ProtocolSpec parse_protocol_spec(const json& root, bool xi_from_grid) {
  const json& p = cli::require(root, "", "protocol");
  cli::check_keys(p, "protocol", {"variant", "xi", "axis", "observable", "projector_onto"});
  const std::string variant = cli::as_string(cli::require(p, "protocol", "variant"),
                                             "protocol.variant");
  auto [psi_i, psi_f] = parse_boundary(cli::require(root, "", "boundary"));
  const std::size_t d = psi_i.dim();

  auto observable = [&]() -> wvsim::Operator {
    if (p.contains("projector_onto")) {
      const wvsim::Ket v = parse_ket(p.at("projector_onto"), "protocol.projector_onto");
      return wvsim::outer(v, v);
    }
    if (!p.contains("observable"))
      throw ConfigError("protocol.observable", "missing field 'protocol.observable'");
    return parse_observable(p, "protocol.observable", d);
  };

  if (variant == "conventional_weak")
    return {wvsim::ConventionalWeak{xi_from_grid ? 1.0 : require_xi(p)}, observable(), psi_i,
            psi_f};
  if (variant == "modified_weak")
    return {wvsim::ModifiedWeak{xi_from_grid ? 1.0 : require_xi(p)}, observable(), psi_i,
            psi_f};
  if (variant == "modular_value")
    return {wvsim::ModularValue{xi_from_grid ? 1.0 : require_xi(p)}, observable(), psi_i,
            psi_f};
  if (variant == "strong_projector")
    return {wvsim::StrongProjector{}, observable(), psi_i, psi_f};
  if (variant == "strong_pauli") {
    const wvsim::PauliAxis axis =
        parse_axis(cli::require(p, "protocol", "axis"), "protocol.axis");
    return {wvsim::StrongPauli{axis}, wvsim::pauli(axis), psi_i, psi_f};
  }
  if (variant == "expanded_hilbert")
    return {wvsim::ExpandedHilbert{}, observable(), psi_i, psi_f};
  throw ConfigError("protocol.variant", "unknown protocol variant '" + variant + "'");
}

wvsim::SamplerConfig parse_sampler(const json& root, const GlobalOpts& opts) {
  wvsim::SamplerConfig cfg;
  if (root.contains("sampler")) {
    const json& s = root.at("sampler");
    cli::check_keys(s, "sampler", {"seed", "shots", "repetitions", "bootstrap"});
    if (s.contains("seed")) cfg.seed = cli::as_u64(s.at("seed"), "sampler.seed");
    if (s.contains("shots")) {
      const json& sh = s.at("shots");
      cli::check_keys(sh, "sampler.shots", {"x", "y", "z"});
      cfg.shots = {0, 0, 0};
      if (sh.contains("x")) cfg.shots[0] = cli::as_u64(sh.at("x"), "sampler.shots.x");
      if (sh.contains("y")) cfg.shots[1] = cli::as_u64(sh.at("y"), "sampler.shots.y");
      if (sh.contains("z")) cfg.shots[2] = cli::as_u64(sh.at("z"), "sampler.shots.z");
    }
    if (s.contains("repetitions"))
      cfg.repetitions = cli::as_u64(s.at("repetitions"), "sampler.repetitions");
    if (s.contains("bootstrap"))
      cfg.bootstrap = cli::as_u64(s.at("bootstrap"), "sampler.bootstrap");
  }
  if (opts.seed_override) cfg.seed = *opts.seed_override;
  if (cfg.repetitions == 0)
    throw ConfigError("sampler.repetitions", "'sampler.repetitions' must be positive");
  return cfg;
}

bool parse_exact_mode(const json& root, const GlobalOpts& opts, bool default_exact) {
  if (opts.force_exact) return true;
  if (!root.contains("mode")) return default_exact;
  const std::string mode = cli::as_string(root.at("mode"), "mode");
  if (mode == "exact") return true;
  if (mode == "shots") return false;
  throw ConfigError("mode", "'mode' must be 'exact' or 'shots'");
}

std::string output_path(const json& root, const GlobalOpts& opts, const std::string& key,
                        const std::string& fallback) {
  if (root.contains("output")) {
    const json& o = root.at("output");
    if (o.contains(key)) return (fs::path(opts.out_dir) /
                                 cli::as_string(o.at(key), "output." + key)).string();
  }
  return (fs::path(opts.out_dir) / fallback).string();
}

void check_output_keys(const json& root, const std::set<std::string>& allowed) {
  if (root.contains("output")) cli::check_keys(root.at("output"), "output", allowed);
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_weak_value(const GlobalOpts& opts) {
  const json root = load_config(opts.config_path);
  cli::check_keys(root, "", {"protocol", "boundary", "mode", "sampler", "output"});
  check_output_keys(root, {"report"});
  const wvsim::ProtocolSpec spec = parse_protocol_spec(root, false);
  const bool exact = parse_exact_mode(root, opts, true);

  wvsim::EstimateReport report;
  std::optional<std::uint64_t> seed;
  if (exact) {
    report = wvsim::run_exact(spec);
  } else {
    const wvsim::SamplerConfig cfg = parse_sampler(root, opts);
    const wvsim::ProtocolRun run = wvsim::make_run(spec);
    const wvsim::ShotCounts counts = wvsim::sample(run.exact, cfg);
    report = wvsim::estimate_from_counts(counts, spec, &cfg);
    seed = cfg.seed;
  }
  const std::string path = output_path(root, opts, "report", "report.json");
  wvsim::atomic_write_file(path, wvsim::estimate_report_json(
                                     report, wvsim::protocol_name(spec.variant),
                                     wvsim::protocol_xi(spec.variant), seed));
  std::cout << path << "\n";
  return 0;
}

int cmd_sweep_xi(const GlobalOpts& opts) {
  const json root = load_config(opts.config_path);
  cli::check_keys(root, "", {"protocol", "boundary", "xi_grid", "sampler", "output"});
  check_output_keys(root, {"csv"});
  const wvsim::ProtocolSpec spec = parse_protocol_spec(root, true);

  const json& grid_json = cli::require(root, "", "xi_grid");
  if (!grid_json.is_array() || grid_json.empty())
    throw ConfigError("xi_grid", "'xi_grid' must be a non-empty array");
  std::vector<double> grid;
  for (std::size_t i = 0; i < grid_json.size(); ++i)
    grid.push_back(cli::as_double(grid_json[i], "xi_grid[" + std::to_string(i) + "]"));

  const wvsim::SamplerConfig cfg = parse_sampler(root, opts);
  const auto rows = wvsim::bias_variance_sweep(spec, grid, cfg);
  const std::string path = output_path(root, opts, "csv", "sweep.csv");
  wvsim::atomic_write_file(path, wvsim::sweep_csv(rows));
  std::cout << path << "\n";
  return 0;
}

wvsim::GridState parse_state(const json& root) {
  const json& s = cli::require(root, "", "state");
  cli::check_keys(s, "state", {"preset", "kind", "n", "x0", "sigma", "k_mode", "seed",
                               "cutoff", "amps"});
  if (s.contains("preset")) {
    const std::string name = cli::as_string(s.at("preset"), "state.preset");
    if (name == "gaussian64") return wvsim::gaussian_benchmark_64();
    throw ConfigError("state.preset", "unknown state preset '" + name + "'");
  }
  if (s.contains("amps"))
    return wvsim::GridState(cli::as_amplitudes(s.at("amps"), "state.amps"));
  const std::string kind = cli::as_string(cli::require(s, "state", "kind"), "state.kind");
  const std::uint64_t n = cli::as_u64(cli::require(s, "state", "n"), "state.n");
  if (kind == "gaussian") {
    const double x0 = cli::as_double(cli::require(s, "state", "x0"), "state.x0");
    const double sigma = cli::as_double(cli::require(s, "state", "sigma"), "state.sigma");
    const double k_mode = s.contains("k_mode")
                              ? cli::as_double(s.at("k_mode"), "state.k_mode") : 0.0;
    return wvsim::gaussian_state(n, x0, sigma,
                                 2.0 * std::numbers::pi * k_mode / static_cast<double>(n));
  }
  if (kind == "two_peak") return wvsim::two_peak_state(n);
  if (kind == "random_smooth") {
    const std::uint64_t seed = cli::as_u64(cli::require(s, "state", "seed"), "state.seed");
    const std::uint64_t cutoff =
        cli::as_u64(cli::require(s, "state", "cutoff"), "state.cutoff");
    return wvsim::random_smooth_state(n, seed, cutoff);
  }
  throw ConfigError("state.kind", "unknown state kind '" + kind + "'");
}

int cmd_wavefunction(const GlobalOpts& opts) {
  const json root = load_config(opts.config_path);
  cli::check_keys(root, "", {"method", "state", "xi", "mode", "sampler", "target_fidelity",
                             "output"});
  check_output_keys(root, {"csv", "summary"});
  const std::string method = cli::as_string(cli::require(root, "", "method"), "method");
  const wvsim::GridState psi = parse_state(root);

  if (method == "compare") {
    const double target = cli::as_double(cli::require(root, "", "target_fidelity"),
                                         "target_fidelity");
    const double xi = cli::as_double(cli::require(root, "", "xi"), "xi");
    wvsim::SamplerConfig cfg = parse_sampler(root, opts);
    const wvsim::EfficiencyComparison cmp =
        wvsim::efficiency_compare(psi, target, xi, cfg.seed);
    const std::string path = output_path(root, opts, "summary", "efficiency.json");
    wvsim::atomic_write_file(path, wvsim::efficiency_json(cmp, target, xi, cfg.seed));
    std::cout << path << "\n";
    return 0;
  }

  const bool exact = parse_exact_mode(root, opts, true);
  std::optional<wvsim::SamplerConfig> cfg;
  std::optional<std::uint64_t> seed;
  if (!exact) {
    cfg = parse_sampler(root, opts);
    seed = cfg->seed;
  }

  wvsim::DirectMeasResult result = [&]() {
    if (method == "scanning") {
      const double xi = cli::as_double(cli::require(root, "", "xi"), "xi");
      return wvsim::scanning_measure(psi, xi, cfg);
    }
    if (method == "scan_free") return wvsim::scan_free_measure(psi, cfg);
    throw ConfigError("method", "'method' must be scanning, scan_free, or compare");
  }();

  const std::string csv_path = output_path(root, opts, "csv", "wavefunction.csv");
  const std::string summary_path = output_path(root, opts, "summary", "summary.json");
  wvsim::atomic_write_file(csv_path, wvsim::wavefunction_csv(result, psi));
  wvsim::atomic_write_file(summary_path, wvsim::wavefunction_summary_json(result, seed));
  std::cout << csv_path << "\n" << summary_path << "\n";
  return 0;
}

int cmd_kd(const GlobalOpts& opts) {
  const json root = load_config(opts.config_path);
  cli::check_keys(root, "", {"rho_in", "basis_a", "basis_b", "output"});
  check_output_keys(root, {"csv", "summary"});

  const json& rho_json = cli::require(root, "", "rho_in");
  wvsim::Operator rho = [&]() {
    if (rho_json.is_object()) {
      cli::check_keys(rho_json, "rho_in", {"pure"});
      const wvsim::Ket v = parse_ket(cli::require(rho_json, "rho_in", "pure"), "rho_in.pure");
      return wvsim::outer(v, v);
    }
    return cli::as_matrix(rho_json, "rho_in");
  }();

  auto parse_basis = [&](const char* key) -> wvsim::Operator {
    const json& v = cli::require(root, "", key);
    if (v.is_string()) {
      const std::string name = v.get<std::string>();
      if (name == "z") return wvsim::Operator::identity(rho.dim());
      if (name == "dft") return wvsim::dagger(wvsim::dft_matrix(rho.dim()));
      if (name == "x" || name == "y") {
        if (rho.dim() != 2)
          throw ConfigError(key, std::string("basis '") + name + "' needs a qubit");
        wvsim::Operator b(2);
        const wvsim::Ket c0 = (name == "x") ? wvsim::ket_plus() : wvsim::ket_plus_i();
        const wvsim::Ket c1 = (name == "x") ? wvsim::ket_minus() : wvsim::ket_minus_i();
        for (std::size_t r = 0; r < 2; ++r) {
          b.at(r, 0) = c0[r];
          b.at(r, 1) = c1[r];
        }
        return b;
      }
      throw ConfigError(key, std::string("unknown basis '") + name + "'");
    }
    return cli::as_matrix(v, key);
  };

  const wvsim::Operator basis_a = parse_basis("basis_a");
  const wvsim::Operator basis_b = parse_basis("basis_b");
  const wvsim::Operator grid = wvsim::kirkwood_dirac(rho, basis_a, basis_b);

  std::string csv = "a,b,re,im\n";
  wvsim::Complex total{0.0, 0.0};
  for (std::size_t ia = 0; ia < grid.dim(); ++ia)
    for (std::size_t ib = 0; ib < grid.dim(); ++ib) {
      csv += std::to_string(ia) + "," + std::to_string(ib) + "," +
             wvsim::format_g17(grid.at(ia, ib).real()) + "," +
             wvsim::format_g17(grid.at(ia, ib).imag()) + "\n";
      total += grid.at(ia, ib);
    }
  json summary;
  summary["dim"] = grid.dim();
  summary["total"] = {{"re", total.real()}, {"im", total.imag()}};

  const std::string csv_path = output_path(root, opts, "csv", "kd.csv");
  const std::string summary_path = output_path(root, opts, "summary", "kd.json");
  wvsim::atomic_write_file(csv_path, csv);
  wvsim::atomic_write_file(summary_path, summary.dump(2) + "\n");
  std::cout << csv_path << "\n" << summary_path << "\n";
  return 0;
}

int cmd_diagram(const GlobalOpts& opts, const std::string& in_path, const std::string& action,
                int k, int idx) {
  std::ifstream in(in_path);
  if (!in) throw ConfigError("in", "cannot open diagram file '" + in_path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();

  wvsim::Diagram d = [&]() {
    try {
      return wvsim::parse_diagram(buffer.str());
    } catch (const std::invalid_argument& e) {
      throw ConfigError("in", std::string("invalid diagram JSON: ") + e.what());
    } catch (const json::exception& e) {
      throw ConfigError("in", std::string("invalid diagram JSON: ") + e.what());
    }
  }();

  json out;
  if (action == "evaluate") {
    const wvsim::Complex v = wvsim::evaluate(d);
    out["value"] = {{"re", v.real()}, {"im", v.imag()}};
  } else if (action == "rotate") {
    out = json::parse(wvsim::serialize_diagram(wvsim::rotate(d, k)));
  } else if (action == "split") {
    if (idx < 0 || idx > 3) throw ConfigError("idx", "'idx' must be in [0, 3]");
    out["children"] = json::array();
    for (const auto& term : wvsim::spectral_split(d, static_cast<std::size_t>(idx))) {
      json child;
      child["weight"] = term.weight;
      child["diagram"] = json::parse(wvsim::serialize_diagram(term.child));
      out["children"].push_back(child);
    }
  } else if (action == "compile") {
    const wvsim::FrameworkInstance inst = wvsim::compile(d);
    auto matrix_json = [](const wvsim::Operator& m) {
      json entries = json::array();
      for (const wvsim::Complex& e : m.entries()) entries.push_back({e.real(), e.imag()});
      return entries;
    };
    out["t0"] = matrix_json(inst.ct.t0);
    out["t1"] = matrix_json(inst.ct.t1);
    out["initial"] = matrix_json(inst.boundary.initial);
    out["final_effect"] = matrix_json(inst.boundary.final_effect);
    out["scale"] = {inst.scale.real(), inst.scale.imag()};
    const wvsim::Complex check =
        inst.scale * wvsim::extract_complex(
                         wvsim::joint_probabilities(inst.ct, inst.boundary));
    out["reproduced_value"] = {{"re", check.real()}, {"im", check.imag()}};
  } else {
    throw ConfigError("action", "action must be evaluate, rotate, split, or compile");
  }

  const std::string path = (fs::path(opts.out_dir) / "diagram_out.json").string();
  wvsim::atomic_write_file(path, out.dump(2) + "\n");
  std::cout << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation lab for probe-controlled weak-value measurement"};
  app.require_subcommand(1);

  GlobalOpts opts;
  std::string diagram_in, diagram_action;
  int diagram_k = 1;
  int diagram_idx = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON config file")->required();
    sub->add_option("--out", opts.out_dir, "Output directory (default: .)");
    sub->add_option("--seed", opts.seed_override, "Override the sampler seed");
    sub->add_flag("--exact", opts.force_exact, "Force exact-probability evaluation");
  };

  CLI::App* weak = app.add_subcommand("weak-value", "Run one measurement protocol");
  add_common(weak);
  CLI::App* sweep = app.add_subcommand("sweep-xi", "Coupling sweep with seeded repetitions");
  add_common(sweep);
  CLI::App* wf = app.add_subcommand("wavefunction", "Direct wavefunction measurement");
  add_common(wf);
  CLI::App* kd = app.add_subcommand("kd", "Kirkwood-Dirac quasiprobability grid");
  add_common(kd);

  CLI::App* diag = app.add_subcommand("diagram", "Evaluate or rewrite a 4-node loop");
  diag->add_option("--in", diagram_in, "Diagram JSON file")->required();
  diag->add_option("--action", diagram_action, "evaluate | rotate | split | compile")
      ->required();
  diag->add_option("--k", diagram_k, "Rotation amount (rotate)");
  diag->add_option("--idx", diagram_idx, "Node index (split)");
  diag->add_option("--out", opts.out_dir, "Output directory (default: .)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (weak->parsed()) return cmd_weak_value(opts);
    if (sweep->parsed()) return cmd_sweep_xi(opts);
    if (wf->parsed()) return cmd_wavefunction(opts);
    if (kd->parsed()) return cmd_kd(opts);
    if (diag->parsed()) return cmd_diagram(opts, diagram_in, diagram_action, diagram_k,
                                           diagram_idx);
  } catch (const ConfigError& e) {
    std::cerr << "ERR:2:" << e.field << " " << e.what() << "\n";
    return 2;
  } catch (const wvsim::PhysicalityError& e) {
    std::cerr << "ERR:3:physicality " << e.what() << "\n";
    return 3;
  } catch (const wvsim::DegenerateEstimatorError& e) {
    std::cerr << "ERR:4:estimator " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "ERR:2:input " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ERR:1:internal " << e.what() << "\n";
    return 1;
  }
  return 0;
}
