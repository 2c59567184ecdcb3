#include "iontrap/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "iontrap/analysis.hpp"
#include "iontrap/io.hpp"
#include "iontrap/optimize.hpp"

namespace iontrap {

namespace {

using nlohmann::json;

struct CommandContext {
  RunConfig config;
  RegisterSetup setup;
  CliOptions options;
  std::string config_hash;
  std::vector<std::string> outputs;
};

std::string out_path(const CommandContext& ctx, const std::string& name) {
  return ctx.options.out_dir + "/" + name;
}

void write_manifest(CommandContext& ctx, const std::string& command) {
  json manifest;
  manifest["command"] = command;
  manifest["version"] = kVersion;
  manifest["config_path"] = ctx.options.config_path;
  manifest["config_hash_fnv1a64"] = ctx.config_hash;
  manifest["seed"] = ctx.config.seed;
  manifest["trials"] = ctx.config.trials;
  manifest["threads"] = ctx.options.threads;
  manifest["outputs"] = ctx.outputs;
  const std::string path = out_path(ctx, command + "_manifest.json");
  std::ofstream out(path);
  out << manifest.dump(2) << "\n";
}

BenchmarkPlan plan_from_config(const CommandContext& ctx, int addressed_ion) {
  BenchmarkPlan plan;
  plan.n_values = ctx.config.n_values;
  plan.trials = ctx.config.trials;
  plan.seed = mix_u64(ctx.config.seed ^ mix_u64(static_cast<std::uint64_t>(addressed_ion) + 1));
  plan.input_state = ctx.config.input_state;
  plan.qubit_channel = ctx.config.qubit_channel;
  plan.addressed_ion = addressed_ion;
  plan.carrier_detuning_hz = ctx.config.carrier_detuning_hz;
  plan.pulse_duration_s = ctx.config.duration_s;
  plan.readout = ctx.setup.readout;
  plan.threads = ctx.options.threads;
  return plan;
}

const CouplingConfig* coupling_of(const CommandContext& ctx) {
  return ctx.setup.coupling.enabled ? &ctx.setup.coupling : nullptr;
}

double mean_next_neighbor_detuning(const TransitionSet& transitions) {
  double sum = 0.0;
  for (int i = 0; i + 1 < transitions.size(); ++i)
    sum += transitions.sigma_plus_hz[i + 1] - transitions.sigma_plus_hz[i];
  return sum / (transitions.size() - 1);
}

int cmd_positions(CommandContext& ctx) {
  CsvWriter csv(out_path(ctx, "positions.csv"),
                {"ion_index", "position_m", "pi_hz", "sigma_plus_hz", "sigma_minus_hz"});
  for (int i = 0; i < ctx.setup.chain.size(); ++i)
    csv.row({double(i + 1), ctx.setup.chain.positions_m[i], ctx.setup.transitions.pi_hz[i],
             ctx.setup.transitions.sigma_plus_hz[i], ctx.setup.transitions.sigma_minus_hz[i]});
  ctx.outputs.push_back("positions.csv");
  return 0;
}

int cmd_spectrum(CommandContext& ctx) {
  const Eigen::VectorXd& sigma_plus = ctx.setup.transitions.sigma_plus_hz;
  const double lo = sigma_plus.minCoeff() - 1.5e6;
  const double hi = sigma_plus.maxCoeff() + 1.5e6;
  const int points = 2001;
  Eigen::VectorXd grid(points);
  for (int i = 0; i < points; ++i) grid[i] = lo + (hi - lo) * i / (points - 1);
  const Eigen::MatrixXd scan = spectrum_scan(ctx.setup.chain, ctx.setup.transitions,
                                             ctx.setup.rabi, ctx.config.duration_s, grid);
  std::vector<std::string> header{"frequency_hz"};
  for (int ion = 1; ion <= scan.cols(); ++ion)
    header.push_back("excitation_ion" + std::to_string(ion));
  CsvWriter csv(out_path(ctx, "spectrum.csv"), header);
  for (int g = 0; g < points; ++g) {
    std::vector<double> row{grid[g]};
    for (int ion = 0; ion < scan.cols(); ++ion) row.push_back(scan(g, ion));
    csv.row(row);
  }
  ctx.outputs.push_back("spectrum.csv");
  return 0;
}

int cmd_rabi(CommandContext& ctx) {
  const int addressed = addressed_ion_list(ctx.config).front();
  const double carrier =
      transition_frequency(ctx.setup.transitions, addressed, ctx.config.qubit_channel) +
      ctx.config.carrier_detuning_hz;
  const double rabi = std::max(ctx.setup.rabi.channel_rabi(addressed, ctx.config.qubit_channel),
                               1e3);
  const double tau_max = 3.0 / rabi;
  const int points = 600;

  std::vector<std::string> header{"tau_s"};
  for (int ion = 1; ion <= ctx.setup.chain.size(); ++ion)
    header.push_back("excitation_ion" + std::to_string(ion));
  CsvWriter csv(out_path(ctx, "rabi.csv"), header);
  for (int i = 1; i <= points; ++i) {
    const double tau = tau_max * i / points;
    const Pulse pulse{carrier, 0.0, tau};
    const RegisterState state = apply_pulse(RegisterState::ground(ctx.setup.chain.size()), pulse,
                                            ctx.setup.transitions, ctx.setup.rabi);
    const Eigen::VectorXd p = bright_probabilities(state);
    std::vector<double> row{tau};
    for (int ion = 0; ion < p.size(); ++ion) row.push_back(p[ion]);
    csv.row(row);
  }
  ctx.outputs.push_back("rabi.csv");
  return 0;
}

json fit_to_json(int addressed, const FidelityCurve& curve) {
  json entry;
  entry["addressed"] = addressed + 1;
  entry["spectator"] = curve.ion_index + 1;
  std::vector<int> lengths;
  for (const FidelityPoint& p : curve.points) lengths.push_back(p.n);
  std::sort(lengths.begin(), lengths.end());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
  if (lengths.size() < 3) {
    // Too short to fit a decay; report the initial fidelity alone.
    entry["p0"] = curve.points.front().fidelity;
    entry["p0_sigma"] = curve.points.front().stderr_;
    entry["note"] = "fewer than 3 sequence lengths, no decay fitted";
    return entry;
  }
  try {
    const FitResult fit = fit_decay(curve);
    entry["c"] = fit.crosstalk;
    entry["c_sigma"] = fit.crosstalk_sigma;
    entry["p0"] = fit.p0;
    entry["p0_sigma"] = fit.p0_sigma;
    entry["reduced_chi2"] = fit.reduced_chi2;
  } catch (const std::exception& error) {
    entry["error"] = error.what();
  }
  return entry;
}

int cmd_benchmark(CommandContext& ctx) {
  // A resonantly driven ion carries no decay to fit; with a detuned carrier
  // (the spectator-only single-ion case) its own curve is the signal.
  const bool addressed_resonant = ctx.config.carrier_detuning_hz == 0.0;
  json summary = json::array();
  for (int addressed : addressed_ion_list(ctx.config)) {
    const BenchmarkPlan plan = plan_from_config(ctx, addressed);
    const BenchmarkResult result =
        run_benchmark(ctx.setup.transitions, ctx.setup.rabi, plan, coupling_of(ctx));
    const std::vector<FidelityCurve> curves =
        curves_from_benchmark(result, ctx.config.input_state, addressed);

    const std::string name = "benchmark_ion" + std::to_string(addressed + 1) + ".csv";
    CsvWriter csv(out_path(ctx, name), {"N", "ion_index", "trials", "bright_count",
                                        "fidelity_mean", "fidelity_stderr"});
    for (const FidelityCurve& curve : curves) {
      for (std::size_t li = 0; li < result.n_values.size(); ++li) {
        const FidelityPoint& p = curve.points[li];
        csv.row({double(p.n), double(curve.ion_index + 1), double(p.trials),
                 result.bright_sum(li, curve.ion_index), p.fidelity, p.stderr_});
      }
      if (curve.ion_index != addressed || !addressed_resonant)
        summary.push_back(fit_to_json(addressed, curve));
    }
    ctx.outputs.push_back(name);
  }
  std::ofstream out(out_path(ctx, "benchmark_summary.json"));
  out << summary.dump(2) << "\n";
  ctx.outputs.push_back("benchmark_summary.json");
  return 0;
}

int cmd_xtalk(CommandContext& ctx) {
  const std::vector<int> addressed = addressed_ion_list(ctx.config);
  const int n = ctx.config.ion_count;
  std::vector<std::vector<FidelityCurve>> curves(n);
  for (int ion : addressed) {
    const BenchmarkPlan plan = plan_from_config(ctx, ion);
    const BenchmarkResult result =
        run_benchmark(ctx.setup.transitions, ctx.setup.rabi, plan, coupling_of(ctx));
    curves[ion] = curves_from_benchmark(result, ctx.config.input_state, ion);
  }
  const CrosstalkMatrix matrix = crosstalk_matrix(curves);

  json entries = json::array();
  for (int i : addressed)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      json entry;
      entry["addressed"] = i + 1;
      entry["spectator"] = j + 1;
      if (std::isnan(matrix.value(i, j))) {
        entry["error"] = "fit failed";
      } else {
        entry["c"] = matrix.value(i, j);
        entry["c_sigma"] = matrix.sigma(i, j);
      }
      entries.push_back(entry);
    }
  json doc;
  doc["entries"] = entries;
  std::ofstream out(out_path(ctx, "crosstalk_matrix.json"));
  out << doc.dump(2) << "\n";
  ctx.outputs.push_back("crosstalk_matrix.json");

  std::vector<std::string> header{"i"};
  for (int j = 1; j <= n; ++j) header.push_back("j" + std::to_string(j));
  CsvWriter csv(out_path(ctx, "crosstalk_matrix.csv"), header);
  for (int i : addressed) {
    std::vector<double> row{double(i + 1)};
    for (int j = 0; j < n; ++j) row.push_back(matrix.value(i, j));
    csv.row(row);
  }
  ctx.outputs.push_back("crosstalk_matrix.csv");
  return 0;
}

int cmd_optimize(CommandContext& ctx) {
  const double gradient = ctx.config.gradient_t_per_m;
  const BiasResult bias = optimal_bias(ctx.setup.chain, gradient, PhysicalConstants{}, 1);
  const double target_rabi = ctx.setup.rabi.rabi_hz.col(1).mean();
  const int harmonic = harmonic_for_rabi(bias.delta_tilde_hz, target_rabi);
  const PulseSolution solution = optimal_duration(bias.delta_tilde_hz, harmonic);

  // Rebuild the transition map at the commensurate bias.
  FieldConfig field;
  field.gradient_t_per_m = gradient;
  field.bias_t = bias.bias_t;
  field.zero_position_m = ctx.setup.chain.positions_m[0];
  const TransitionSet transitions =
      transition_map(ctx.setup.chain, field, PhysicalConstants{});
  const RabiMap rabi = RabiMap::uniform(
      ctx.config.ion_count, solution.rabi_hz,
      Eigen::Vector3d(ctx.config.weight_pi, ctx.config.weight_sigma_plus,
                      ctx.config.weight_sigma_minus));

  const int points = 241;
  const double half_window = 0.4 / bias.delta_tilde_hz;
  Eigen::VectorXd grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = solution.tau_s - half_window + 2.0 * half_window * i / (points - 1);
  const ObjectiveResult objective = crosstalk_objective(transitions, rabi, grid);

  // Commensurability of the common resonance and the sigma- comb.
  json pi_offsets = json::array();
  json sigma_minus_offsets = json::array();
  const double carrier1 = transitions.sigma_plus_hz[0];
  for (int k = 0; k < ctx.config.ion_count; ++k) {
    const double pi_units = (carrier1 - transitions.pi_hz[k]) / bias.delta_tilde_hz;
    pi_offsets.push_back(pi_units - std::round(pi_units));
    const double sm_units = (carrier1 - transitions.sigma_minus_hz[k]) / bias.delta_tilde_hz;
    sigma_minus_offsets.push_back(sm_units - std::round(sm_units));
  }

  json report;
  report["delta_tilde_hz"] = bias.delta_tilde_hz;
  report["next_neighbor_residual_hz"] =
      std::vector<double>(bias.residual_hz.data(), bias.residual_hz.data() + bias.residual_hz.size());
  report["bias_t"] = bias.bias_t;
  report["harmonic"] = harmonic;
  report["tau_s"] = solution.tau_s;
  report["rabi_hz"] = solution.rabi_hz;
  report["objective_grid_minimum_tau_s"] = objective.grid_minimum_tau_s;
  report["objective_refined_tau_s"] = objective.refined_tau_s;
  report["objective_refined_value"] = objective.refined_value;
  report["pi_comb_residuals"] = pi_offsets;
  report["sigma_minus_comb_residuals"] = sigma_minus_offsets;
  std::ofstream out(out_path(ctx, "optimize_report.json"));
  out << report.dump(2) << "\n";
  ctx.outputs.push_back("optimize_report.json");

  CsvWriter csv(out_path(ctx, "objective.csv"), {"tau_s", "total_crosstalk_per_pulse"});
  for (int i = 0; i < objective.tau_grid_s.size(); ++i)
    csv.row({objective.tau_grid_s[i], objective.total_crosstalk[i]});
  ctx.outputs.push_back("objective.csv");
  return 0;
}

int cmd_scaling(CommandContext& ctx) {
  const double omega = ctx.setup.rabi.rabi_hz.col(1).mean();
  double detuning = ctx.config.carrier_detuning_hz;
  if (ctx.config.ion_count >= 2) detuning = mean_next_neighbor_detuning(ctx.setup.transitions);
  if (detuning == 0.0)
    throw ConfigError("scaling needs a nonzero detuning (two ions or carrier_detuning_hz)", 0,
                      "carrier_detuning_hz");
  const double tau = ctx.config.duration_s;

  const double c = crosstalk_probability(omega, detuning, tau);
  const double eps_ac = dephasing_error(light_shift_phase_rad(omega, detuning, tau));
  const double eps_j = dephasing_error(j_coupling_phase_rad(ctx.config.j_nn_hz, tau));

  const std::string path = out_path(ctx, "scaling.csv");
  std::ofstream out(path);
  out << "source,value,omega_exponent,gradient_exponent,secular_exponent\n";
  out << "non_resonant_excitation," << format_number(c) << ","
      << format_number(kNonResonantScaling.omega_exponent) << ","
      << format_number(kNonResonantScaling.gradient_exponent) << ","
      << format_number(kNonResonantScaling.secular_exponent) << "\n";
  out << "light_shift," << format_number(eps_ac) << ","
      << format_number(kLightShiftScaling.omega_exponent) << ","
      << format_number(kLightShiftScaling.gradient_exponent) << ","
      << format_number(kLightShiftScaling.secular_exponent) << "\n";
  out << "j_coupling," << format_number(eps_j) << ","
      << format_number(kJCouplingScaling.omega_exponent) << ","
      << format_number(kJCouplingScaling.gradient_exponent) << ","
      << format_number(kJCouplingScaling.secular_exponent) << "\n";
  if (ctx.config.sideband_eta > 0.0) {
    // No published scaling triple for this channel; exponents left blank.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double sideband = sideband_crosstalk(ctx.setup.sideband, omega, detuning, tau);
    out << "sideband_excitation," << format_number(sideband) << "," << format_number(nan) << ","
        << format_number(nan) << "," << format_number(nan) << "\n";
  }
  ctx.outputs.push_back("scaling.csv");
  return 0;
}

int cmd_oracle(CommandContext& ctx) {
  // Clean single-ion geometry: drive only the common resonance, detuned by
  // 2 MHz, with the pulse duration at a half-integer revolution.
  TransitionSet transitions;
  const double f0 = PhysicalConstants{}.hyperfine_hz;
  transitions.pi_hz = Eigen::VectorXd::Constant(1, f0);
  transitions.sigma_plus_hz = Eigen::VectorXd::Constant(1, f0 + 12e6);
  transitions.sigma_minus_hz = Eigen::VectorXd::Constant(1, f0 - 12e6);
  const double detuning = 2e6;
  const double tau = 25.125e-6;
  const int n = ctx.config.n_values.empty() ? 1250 : ctx.config.n_values.back();

  CsvWriter csv(out_path(ctx, "oracle.csv"),
                {"c_target", "c_exact", "n", "fidelity_analytic", "fidelity_walk", "walk_stderr",
                 "fidelity_unitary", "unitary_stderr", "z_walk_analytic", "z_unitary_analytic",
                 "z_walk_unitary"});
  for (double c_target : {1e-5, 1e-4, 1e-3}) {
    double omega = detuning * std::sqrt(c_target);
    for (int it = 0; it < 3; ++it) {
      const double s = std::sin(M_PI * generalized_rabi_hz(omega, detuning) * tau);
      omega = detuning * std::sqrt(c_target) / std::abs(s);
    }
    const double c_exact = crosstalk_probability(omega, detuning, tau);
    const RabiMap rabi = RabiMap::uniform(1, omega, Eigen::Vector3d(1.0, 0.0, 0.0));

    const double analytic = predict_fidelity(c_exact, n);
    const WalkEstimate walk = random_walk_oracle(c_exact, n, 10000, ctx.config.seed + 17);

    BenchmarkPlan plan;
    plan.n_values = {n};
    plan.trials = ctx.config.trials;
    plan.seed = mix_u64(ctx.config.seed ^ 0x5EED0217ULL);
    plan.input_state = InputState::kEigenstate;
    plan.qubit_channel = Channel::kPi;
    plan.addressed_ion = 0;
    plan.carrier_detuning_hz = detuning;
    plan.pulse_duration_s = tau;
    plan.sample_readout = false;
    plan.threads = ctx.options.threads;
    const BenchmarkResult result = run_benchmark(transitions, rabi, plan);
    const double mean_bright = result.bright_sum(0, 0) / plan.trials;
    const double unitary = 1.0 - mean_bright;
    const double var =
        std::max(0.0, result.bright_sumsq(0, 0) / plan.trials - mean_bright * mean_bright);
    const double unitary_stderr = std::sqrt(var / plan.trials);

    const double z_walk = std::abs(walk.fidelity - analytic) / std::max(walk.stderr_, 1e-300);
    const double z_unit = std::abs(unitary - analytic) / std::max(unitary_stderr, 1e-300);
    const double z_both = std::abs(walk.fidelity - unitary) /
                          std::hypot(walk.stderr_, unitary_stderr);
    csv.row({c_target, c_exact, double(n), analytic, walk.fidelity, walk.stderr_, unitary,
             unitary_stderr, z_walk, z_unit, z_both});
  }
  ctx.outputs.push_back("oracle.csv");
  return 0;
}

}  // namespace

int run_command(const std::string& command, const CliOptions& options) {
  std::ifstream in(options.config_path);
  if (!in) throw ConfigError("cannot open config file '" + options.config_path + "'", 0);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  CommandContext ctx;
  ctx.options = options;
  ctx.config = parse_config_text(text);
  ctx.config_hash = to_hex(fnv1a64(text));
  if (options.seed_override) ctx.config.seed = *options.seed_override;
  if (options.trials_override) {
    if (*options.trials_override < 1) throw ConfigError("--trials must be >= 1", 0, "trials");
    ctx.config.trials = *options.trials_override;
  }
  ctx.setup = build_register(ctx.config);
  ensure_directory(options.out_dir);

  int code = 0;
  if (command == "positions") {
    code = cmd_positions(ctx);
  } else if (command == "spectrum") {
    code = cmd_spectrum(ctx);
  } else if (command == "rabi") {
    code = cmd_rabi(ctx);
  } else if (command == "benchmark") {
    code = cmd_benchmark(ctx);
  } else if (command == "xtalk") {
    code = cmd_xtalk(ctx);
  } else if (command == "optimize") {
    code = cmd_optimize(ctx);
  } else if (command == "scaling") {
    code = cmd_scaling(ctx);
  } else if (command == "oracle") {
    code = cmd_oracle(ctx);
  } else {
    throw ConfigError("unknown command '" + command + "'", 0);
  }
  if (code == 0) write_manifest(ctx, command);
  return code;
}

}  // namespace iontrap
