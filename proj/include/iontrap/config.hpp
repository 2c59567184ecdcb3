#ifndef IONTRAP_CONFIG_HPP
#define IONTRAP_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "iontrap/benchmark.hpp"
#include "iontrap/chain.hpp"
#include "iontrap/dynamics.hpp"

namespace iontrap {

struct ConfigError : std::runtime_error {
  int line = 0;
  std::string key;
  ConfigError(const std::string& what, int line_number, std::string key_name = {})
      : std::runtime_error(what), line(line_number), key(std::move(key_name)) {}
};

enum class ZeroReference { kFirstIon, kCenter, kCustom };

// Full run configuration.  Sectioned key = value text with units in the key
// names; unknown sections and keys are rejected with line diagnostics.
struct RunConfig {
  // [trap]
  int ion_count = 1;
  double secular_frequency_hz = 124e3;
  std::string ion_species = "yb171";
  double ion_mass_kg = kYb171IonMassKg;

  // [field]
  double gradient_t_per_m = 0.0;
  double bias_t = 0.0;
  ZeroReference zero_reference = ZeroReference::kFirstIon;
  double zero_position_m = 0.0;

  // [pulses]
  std::vector<double> rabi_hz = {20e3};  // one value, or one per ion
  double weight_pi = 1.0;
  double weight_sigma_plus = 1.0;
  double weight_sigma_minus = 1.0;
  double duration_s = 25e-6;

  // [benchmark]
  std::vector<int> n_values = {0, 250, 500, 750, 1000, 1250};
  int trials = 100;
  std::uint64_t seed = 1;
  InputState input_state = InputState::kEigenstate;
  Channel qubit_channel = Channel::kSigmaPlus;
  std::vector<int> addressed_ions;  // empty = all
  double carrier_detuning_hz = 0.0;

  // [model]
  bool j_enabled = false;
  double j_nn_hz = 0.0;
  double sideband_eta = 0.0;
  double sideband_mean_phonon = 150.0;
  double sideband_mode_hz = 124e3;
  double readout_p = 1.0;

  void validate() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Assembled register pieces shared by the commands.
struct RegisterSetup {
  IonChain chain;
  TransitionSet transitions;
  RabiMap rabi;
  CouplingConfig coupling;
  SidebandConfig sideband;
  ReadoutModel readout;
};

RegisterSetup build_register(const RunConfig& config,
                             const PhysicalConstants& constants = PhysicalConstants{});

// All addressed ions of the run (zero-based), expanding the "all" default.
std::vector<int> addressed_ion_list(const RunConfig& config);

}  // namespace iontrap

#endif  // IONTRAP_CONFIG_HPP
