#include "iontrap/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace iontrap {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& value, int line, const std::string& key) {
  const std::string v = trim(value);
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || trim(end) != "")
    throw ConfigError("expected a number for '" + key + "', got '" + v + "'", line, key);
  return x;
}

long long parse_integer(const std::string& value, int line, const std::string& key) {
  const double x = parse_number(value, line, key);
  const long long i = static_cast<long long>(x);
  if (static_cast<double>(i) != x)
    throw ConfigError("expected an integer for '" + key + "'", line, key);
  return i;
}

bool parse_bool(const std::string& value, int line, const std::string& key) {
  const std::string v = trim(value);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("expected true/false for '" + key + "'", line, key);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

}  // namespace

void RunConfig::validate() const {
  if (ion_count < 1) throw ConfigError("trap.ion_count must be >= 1", 0, "ion_count");
  if (!(secular_frequency_hz > 0.0))
    throw ConfigError("trap.secular_frequency_hz must be > 0", 0, "secular_frequency_hz");
  if (!(ion_mass_kg > 0.0)) throw ConfigError("trap.ion_mass_kg must be > 0", 0, "ion_mass_kg");
  if (gradient_t_per_m < 0.0)
    throw ConfigError("field.gradient_t_per_m must be >= 0", 0, "gradient_t_per_m");
  if (rabi_hz.size() != 1 && rabi_hz.size() != static_cast<std::size_t>(ion_count))
    throw ConfigError("pulses.rabi_hz needs one value or one per ion", 0, "rabi_hz");
  for (double r : rabi_hz)
    if (r < 0.0) throw ConfigError("pulses.rabi_hz must be >= 0", 0, "rabi_hz");
  if (weight_pi < 0.0 || weight_sigma_plus < 0.0 || weight_sigma_minus < 0.0)
    throw ConfigError("pulses.weight_* must be >= 0", 0, "weights");
  if (!(duration_s > 0.0)) throw ConfigError("pulses.duration_s must be > 0", 0, "duration_s");
  if (n_values.empty()) throw ConfigError("benchmark.n_values must not be empty", 0, "n_values");
  for (int n : n_values)
    if (n < 0) throw ConfigError("benchmark.n_values must be >= 0", 0, "n_values");
  if (trials < 1) throw ConfigError("benchmark.trials must be >= 1", 0, "trials");
  for (int ion : addressed_ions)
    if (ion < 1 || ion > ion_count)
      throw ConfigError("benchmark.addressed_ions entries must be in 1.." +
                            std::to_string(ion_count),
                        0, "addressed_ions");
  if (j_enabled && j_nn_hz < 0.0) throw ConfigError("model.j_nn_hz must be >= 0", 0, "j_nn_hz");
  if (sideband_eta < 0.0) throw ConfigError("model.sideband_eta must be >= 0", 0, "sideband_eta");
  if (sideband_mean_phonon < 0.0)
    throw ConfigError("model.sideband_mean_phonon must be >= 0", 0, "sideband_mean_phonon");
  if (!(readout_p > 0.5) || !(readout_p <= 1.0))
    throw ConfigError("model.readout_p must be in (0.5, 1]", 0, "readout_p");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  std::istringstream stream(text);
  std::string raw;
  std::string section;
  int line_number = 0;
  bool ion_mass_given = false;

  while (std::getline(stream, raw)) {
    ++line_number;
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header '" + line + "'", line_number);
      section = trim(line.substr(1, line.size() - 2));
      if (section != "trap" && section != "field" && section != "pulses" &&
          section != "benchmark" && section != "model")
        throw ConfigError("unknown section [" + section + "]", line_number);
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value', got '" + line + "'", line_number);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError("key '" + key + "' appears before any [section]", line_number, key);

    if (section == "trap") {
      if (key == "ion_count") {
        config.ion_count = static_cast<int>(parse_integer(value, line_number, key));
      } else if (key == "secular_frequency_hz") {
        config.secular_frequency_hz = parse_number(value, line_number, key);
      } else if (key == "ion_species") {
        config.ion_species = value;
        if (value == "yb171") {
          if (!ion_mass_given) config.ion_mass_kg = kYb171IonMassKg;
        } else {
          throw ConfigError("unknown ion_species '" + value + "' (use yb171 or ion_mass_kg)",
                            line_number, key);
        }
      } else if (key == "ion_mass_kg") {
        config.ion_mass_kg = parse_number(value, line_number, key);
        ion_mass_given = true;
      } else {
        throw ConfigError("unknown key 'trap." + key + "'", line_number, key);
      }
    } else if (section == "field") {
      if (key == "gradient_t_per_m") {
        config.gradient_t_per_m = parse_number(value, line_number, key);
      } else if (key == "bias_t") {
        config.bias_t = parse_number(value, line_number, key);
      } else if (key == "zero_reference") {
        if (value == "ion1")
          config.zero_reference = ZeroReference::kFirstIon;
        else if (value == "center")
          config.zero_reference = ZeroReference::kCenter;
        else if (value == "custom")
          config.zero_reference = ZeroReference::kCustom;
        else
          throw ConfigError("zero_reference must be ion1, center or custom", line_number, key);
      } else if (key == "zero_position_m") {
        config.zero_position_m = parse_number(value, line_number, key);
      } else {
        throw ConfigError("unknown key 'field." + key + "'", line_number, key);
      }
    } else if (section == "pulses") {
      if (key == "rabi_hz") {
        config.rabi_hz.clear();
        for (const std::string& item : split_list(value))
          config.rabi_hz.push_back(parse_number(item, line_number, key));
        if (config.rabi_hz.empty())
          throw ConfigError("pulses.rabi_hz must not be empty", line_number, key);
      } else if (key == "weight_pi") {
        config.weight_pi = parse_number(value, line_number, key);
      } else if (key == "weight_sigma_plus") {
        config.weight_sigma_plus = parse_number(value, line_number, key);
      } else if (key == "weight_sigma_minus") {
        config.weight_sigma_minus = parse_number(value, line_number, key);
      } else if (key == "duration_s") {
        config.duration_s = parse_number(value, line_number, key);
      } else {
        throw ConfigError("unknown key 'pulses." + key + "'", line_number, key);
      }
    } else if (section == "benchmark") {
      if (key == "n_values") {
        config.n_values.clear();
        for (const std::string& item : split_list(value))
          config.n_values.push_back(static_cast<int>(parse_integer(item, line_number, key)));
      } else if (key == "trials") {
        config.trials = static_cast<int>(parse_integer(value, line_number, key));
      } else if (key == "seed") {
        config.seed = static_cast<std::uint64_t>(parse_integer(value, line_number, key));
      } else if (key == "input_state") {
        if (value == "eigenstate")
          config.input_state = InputState::kEigenstate;
        else if (value == "superposition")
          config.input_state = InputState::kSuperposition;
        else
          throw ConfigError("input_state must be eigenstate or superposition", line_number, key);
      } else if (key == "qubit") {
        if (value == "sigma_plus")
          config.qubit_channel = Channel::kSigmaPlus;
        else if (value == "pi")
          config.qubit_channel = Channel::kPi;
        else
          throw ConfigError("qubit must be sigma_plus or pi", line_number, key);
      } else if (key == "addressed_ions") {
        config.addressed_ions.clear();
        if (value != "all")
          for (const std::string& item : split_list(value))
            config.addressed_ions.push_back(
                static_cast<int>(parse_integer(item, line_number, key)));
      } else if (key == "carrier_detuning_hz") {
        config.carrier_detuning_hz = parse_number(value, line_number, key);
      } else {
        throw ConfigError("unknown key 'benchmark." + key + "'", line_number, key);
      }
    } else if (section == "model") {
      if (key == "j_enabled") {
        config.j_enabled = parse_bool(value, line_number, key);
      } else if (key == "j_nn_hz") {
        config.j_nn_hz = parse_number(value, line_number, key);
      } else if (key == "sideband_eta") {
        config.sideband_eta = parse_number(value, line_number, key);
      } else if (key == "sideband_mean_phonon") {
        config.sideband_mean_phonon = parse_number(value, line_number, key);
      } else if (key == "sideband_mode_hz") {
        config.sideband_mode_hz = parse_number(value, line_number, key);
      } else if (key == "readout_p") {
        config.readout_p = parse_number(value, line_number, key);
      } else {
        throw ConfigError("unknown key 'model." + key + "'", line_number, key);
      }
    }
  }

  config.validate();
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

RegisterSetup build_register(const RunConfig& config, const PhysicalConstants& constants) {
  TrapConfig trap;
  trap.ion_count = config.ion_count;
  trap.secular_frequency_hz = config.secular_frequency_hz;
  trap.ion_mass_kg = config.ion_mass_kg;

  RegisterSetup setup;
  setup.chain = equilibrium_positions(trap, constants);

  FieldConfig field;
  field.gradient_t_per_m = config.gradient_t_per_m;
  field.bias_t = config.bias_t;
  switch (config.zero_reference) {
    case ZeroReference::kFirstIon: field.zero_position_m = setup.chain.positions_m[0]; break;
    case ZeroReference::kCenter: field.zero_position_m = 0.0; break;
    case ZeroReference::kCustom: field.zero_position_m = config.zero_position_m; break;
  }
  setup.transitions = transition_map(setup.chain, field, constants);

  Eigen::VectorXd rabi(config.ion_count);
  if (config.rabi_hz.size() == 1) {
    rabi.setConstant(config.rabi_hz[0]);
  } else {
    for (int i = 0; i < config.ion_count; ++i) rabi[i] = config.rabi_hz[i];
  }
  setup.rabi = RabiMap::per_ion(
      rabi, Eigen::Vector3d(config.weight_pi, config.weight_sigma_plus, config.weight_sigma_minus));

  if (config.j_enabled)
    setup.coupling = CouplingConfig::nearest_neighbor(config.ion_count, config.j_nn_hz);

  setup.sideband.mode_frequency_hz = config.sideband_mode_hz;
  setup.sideband.mean_phonon_number = config.sideband_mean_phonon;
  setup.sideband.effective_lamb_dicke = config.sideband_eta;

  setup.readout.p_prep = config.readout_p;
  return setup;
}

std::vector<int> addressed_ion_list(const RunConfig& config) {
  std::vector<int> ions;
  if (config.addressed_ions.empty()) {
    for (int i = 0; i < config.ion_count; ++i) ions.push_back(i);
  } else {
    for (int ion : config.addressed_ions) ions.push_back(ion - 1);
  }
  return ions;
}

}  // namespace iontrap
