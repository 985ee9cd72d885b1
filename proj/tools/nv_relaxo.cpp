// nv-relaxo: relaxometry simulation and inference toolkit for spin-labeled
// proteins on diamond. Subcommands cover background-curve synthesis, decay
// fitting, density inference, the conditional probability map, and the
// estimator sensitivity comparison. All outputs are deterministic functions
// of --seed and identical for any --workers value.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "nvrelax/config.hpp"
#include "nvrelax/io.hpp"
#include "nvrelax/random.hpp"

namespace {

using nlohmann::json;
using namespace nvrelax;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitInternalError = 3;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  bool out_dir_set = false;
  std::vector<std::string> overrides;  // key.path=value
  bool seed_set = false;
  std::uint64_t seed = 0;
  bool workers_set = false;
  int workers = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config or manifest to start from");
  cmd->add_option("--out-dir", opts.out_dir, "output directory")
      ->each([&](const std::string&) { opts.out_dir_set = true; });
  cmd->add_option("--set", opts.overrides, "config override, e.g. --set ensemble.n_nv=1000");
  cmd->add_option("--seed", opts.seed, "master seed")->each([&](const std::string&) {
    opts.seed_set = true;
  });
  cmd->add_option("--workers", opts.workers, "worker threads (0 = auto)")
      ->each([&](const std::string&) { opts.workers_set = true; });
}

void apply_override(json& doc, const std::string& expr) {
  const auto eq = expr.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("--set expects key.path=value: " + expr);
  }
  const std::string path = expr.substr(0, eq);
  const std::string value = expr.substr(eq + 1);

  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw std::invalid_argument("--set has empty path segment: " + expr);
    if (dot == std::string::npos) {
      json parsed;
      try {
        parsed = json::parse(value);
      } catch (const json::parse_error&) {
        parsed = value;  // bare string
      }
      (*node)[key] = parsed;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

RunConfig resolve_config(const CommonOptions& opts) {
  json doc = json::object();
  if (!opts.config_path.empty()) {
    doc = json::parse(read_file(opts.config_path));
    if (doc.is_object() && doc.contains("config")) doc = doc.at("config");
  }
  for (const auto& expr : opts.overrides) apply_override(doc, expr);
  RunConfig config = config_from_json(doc.dump());
  if (opts.seed_set) config.seed = opts.seed;
  if (opts.workers_set) config.workers = opts.workers;
  config.validate();
  return config;
}

std::filesystem::path prepare_out_dir(const CommonOptions& opts) {
  std::filesystem::path dir(opts.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const RunConfig& config,
                    const std::vector<std::pair<std::string, std::string>>& inputs = {}) {
  std::string text = manifest_to_json(command, config);
  if (!inputs.empty()) {
    json j = json::parse(text);
    for (const auto& [key, value] : inputs) j["inputs"][key] = value;
    text = j.dump(2);
  }
  write_file((dir / "manifest.json").string(), text);
}

std::string scan_curve_csv(const DensityScanResult& result) {
  std::string out = "value,score\n";
  for (Eigen::Index i = 0; i < result.scanned_values.size(); ++i) {
    out += format_double(result.scanned_values[i]);
    out += ",";
    out += format_double(result.scores[i]);
    out += "\n";
  }
  return out;
}

int cmd_simulate_background(const CommonOptions& opts) {
  const RunConfig config = resolve_config(opts);
  const auto dir = prepare_out_dir(opts);

  const RatePopulation pop =
      sample_background_rates(config.background_model(), config.ensemble_n_nv,
                              derive_seed(config.seed, "background_population", 0));
  const Eigen::VectorXd grid = resolve_tau_grid(pop, config.t_max, config.tau_points);
  const T1Curve curve = synthesize_curve(pop, grid, config.workers);

  write_file((dir / "t1_curve.csv").string(), t1_curve_to_csv(curve));
  if (config.noise_sd > 0.0) {
    const T1Curve noisy = add_measurement_noise(
        curve, config.noise_sd, derive_seed(config.seed, "background_noise", 0));
    write_file((dir / "t1_curve_noisy.csv").string(), t1_curve_to_csv(noisy));
  }
  write_file((dir / "rate_population.json").string(), rate_population_to_json(pop));
  write_manifest(dir, "simulate-background", config);
  std::cout << "wrote " << (dir / "t1_curve.csv").string() << "\n";
  return kExitOk;
}

int cmd_fit(const std::string& curve_path, const std::string& family_name_arg,
            const std::string& out_path, const CommonOptions& opts) {
  const T1Curve curve = t1_curve_from_csv(read_file(curve_path));
  const DecayFamily family = family_from_name(family_name_arg);
  const FitResult result = fit(curve, family);
  const std::string text = fit_result_to_json(result);
  std::cout << text << "\n";
  if (!out_path.empty()) write_file(out_path, text);
  if (opts.out_dir_set) {
    const RunConfig config = resolve_config(opts);
    const auto dir = prepare_out_dir(opts);
    write_file((dir / "fit.json").string(), text);
    write_manifest(dir, "fit", config,
                   {{"curve", curve_path}, {"family", family_name_arg}});
  }
  return result.converged ? kExitOk : kExitNonConvergence;
}

int cmd_infer(const std::string& kind, const CommonOptions& opts,
              const std::string& target_path, const std::string& rates_path,
              const std::string& deltas_path, double delta_gamma, double delta_gamma_sd) {
  const RunConfig config = resolve_config(opts);
  const auto dir = prepare_out_dir(opts);

  std::vector<std::pair<std::string, std::string>> inputs;
  if (kind == "surface") {
    if (target_path.empty()) throw std::invalid_argument("infer surface requires --target");
    const T1Curve target = t1_curve_from_csv(read_file(target_path));
    SurfaceScanOptions scan_opts;
    scan_opts.n_nv = config.ensemble_n_nv;
    scan_opts.seed = derive_seed(config.seed, "surface_infer", 0);
    scan_opts.workers = config.workers;
    const DensityScanResult result = infer_surface_density_from_curve(
        target, config.depth, config.surface.tau_c_surf, config.surface.gamma_bulk,
        config.surface_scan.values(), scan_opts, config.constants);
    write_file((dir / "scan.json").string(), scan_result_to_json(result));
    write_file((dir / "scan_curve.csv").string(), scan_curve_csv(result));
    inputs.emplace_back("target", target_path);
  } else if (kind == "c-surf") {
    if (rates_path.empty()) throw std::invalid_argument("infer c-surf requires --rates");
    const std::vector<double> rates = rates_from_csv(read_file(rates_path));
    const DensityScanResult result = infer_c_surf_from_histogram(
        rates, config.pillar_depth, config.surface.gamma_bulk, config.c_surf_scan.values());
    write_file((dir / "scan.json").string(), scan_result_to_json(result));
    write_file((dir / "scan_curve.csv").string(), scan_curve_csv(result));
    inputs.emplace_back("rates", rates_path);
  } else if (kind == "label-spacing") {
    if (!(delta_gamma > 0.0)) {
      throw std::invalid_argument("infer label-spacing requires --delta-gamma > 0");
    }
    const SpacingResult result = infer_label_spacing(
        delta_gamma, delta_gamma_sd, config.ub_scan.values(), config.plane_response());
    write_file((dir / "spacing.json").string(), spacing_result_to_json(result));
    inputs.emplace_back("delta_gamma", format_double(delta_gamma));
    inputs.emplace_back("delta_gamma_sd", format_double(delta_gamma_sd));
  } else if (kind == "sa-density") {
    if (deltas_path.empty()) throw std::invalid_argument("infer sa-density requires --deltas");
    const std::vector<double> deltas = deltas_from_csv(read_file(deltas_path));
    SaDensityScanOptions scan_opts;
    scan_opts.delta_cutoff = config.delta_cutoff;
    const DensityScanResult result =
        infer_sa_density(deltas, config.single_nv_sim(), config.sa_scan.values(), scan_opts);
    write_file((dir / "scan.json").string(), scan_result_to_json(result));
    write_file((dir / "scan_curve.csv").string(), scan_curve_csv(result));
    inputs.emplace_back("deltas", deltas_path);
  } else {
    throw std::invalid_argument("unknown infer kind: " + kind);
  }
  write_manifest(dir, "infer " + kind, config, inputs);
  return kExitOk;
}

int cmd_probability_map(const CommonOptions& opts) {
  const RunConfig config = resolve_config(opts);
  const auto dir = prepare_out_dir(opts);

  const ProbabilityMap map = probability_map(config.single_nv_sim(), config.map_config());
  write_file((dir / "map.json").string(), probability_map_to_json(map));
  write_file((dir / "map_matrix.txt").string(), probability_map_matrix(map));
  write_file((dir / "contour.csv").string(), contour_to_csv(map));
  write_manifest(dir, "probability-map", config);
  if (map.empty) std::cout << "map is empty (no induced signal)\n";
  return kExitOk;
}

int cmd_sensitivity(const CommonOptions& opts) {
  const RunConfig config = resolve_config(opts);
  const auto dir = prepare_out_dir(opts);

  const SensitivityTable table =
      sensitivity_compare(config.ub_scan.values(), config.plane_response());
  write_file((dir / "sensitivity.csv").string(), sensitivity_table_to_csv(table));
  write_file((dir / "sensitivity.json").string(), sensitivity_table_to_json(table));
  write_manifest(dir, "sensitivity", config);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NV relaxometry simulation and inference toolkit"};
  app.require_subcommand(1);

  CommonOptions sim_opts;
  CLI::App* sim = app.add_subcommand("simulate-background",
                                     "synthesize an ensemble background T1 curve");
  add_common(sim, sim_opts);

  CommonOptions fit_opts;
  std::string fit_curve_path;
  std::string fit_family = "biexp";
  std::string fit_out;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit a T1 curve CSV");
  fit_cmd->add_option("curve", fit_curve_path, "input T1 curve CSV")->required();
  fit_cmd->add_option("--family", fit_family, "single_exp | biexp | stretched");
  fit_cmd->add_option("--out", fit_out, "write the fit result JSON here");
  add_common(fit_cmd, fit_opts);

  CommonOptions infer_opts;
  std::string infer_kind;
  std::string infer_target, infer_rates, infer_deltas;
  double infer_delta_gamma = 0.0;
  double infer_delta_gamma_sd = 0.0;
  CLI::App* infer_cmd = app.add_subcommand("infer", "invert measurements to densities");
  infer_cmd->add_option("kind", infer_kind, "surface | c-surf | label-spacing | sa-density")
      ->required();
  infer_cmd->add_option("--target", infer_target, "target T1 curve CSV (surface)");
  infer_cmd->add_option("--rates", infer_rates, "background rates CSV (c-surf)");
  infer_cmd->add_option("--deltas", infer_deltas, "signal list CSV (sa-density)");
  infer_cmd->add_option("--delta-gamma", infer_delta_gamma, "measured rate change, s^-1");
  infer_cmd->add_option("--delta-gamma-sd", infer_delta_gamma_sd, "rate change sd, s^-1");
  add_common(infer_cmd, infer_opts);

  CommonOptions map_opts;
  CLI::App* map_cmd = app.add_subcommand(
      "probability-map", "conditional signal density and single-molecule probability");
  add_common(map_cmd, map_opts);

  CommonOptions sens_opts;
  CLI::App* sens_cmd =
      app.add_subcommand("sensitivity", "estimator response slopes vs bonding density");
  add_common(sens_cmd, sens_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate_background(sim_opts);
    if (fit_cmd->parsed()) return cmd_fit(fit_curve_path, fit_family, fit_out, fit_opts);
    if (infer_cmd->parsed()) {
      return cmd_infer(infer_kind, infer_opts, infer_target, infer_rates, infer_deltas,
                       infer_delta_gamma, infer_delta_gamma_sd);
    }
    if (map_cmd->parsed()) return cmd_probability_map(map_opts);
    if (sens_cmd->parsed()) return cmd_sensitivity(sens_opts);
  } catch (const CsvError& e) {
    std::cerr << "input error: " << e.what() << " (line " << e.line << ")\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::domain_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitInternalError;
}
