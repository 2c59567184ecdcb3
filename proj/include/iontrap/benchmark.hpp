#ifndef IONTRAP_BENCHMARK_HPP
#define IONTRAP_BENCHMARK_HPP

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "iontrap/dynamics.hpp"
#include "iontrap/rng.hpp"

namespace iontrap {

enum class InputState { kEigenstate, kSuperposition };

// One randomized sequence: N pulses of fixed duration and carrier, phases
// drawn uniformly from {0, pi/2, pi, 3pi/2}, idle gap of one pulse duration
// after every pulse (50% duty cycle).
struct SequenceSpec {
  int addressed_ion = 0;
  int pulse_count = 0;
  double pulse_duration_s = 0.0;
  double carrier_hz = 0.0;
  std::uint64_t seed = 0;
  InputState input_state = InputState::kEigenstate;
  // Transition carrying the qubit (and the Ramsey pulses of superposition runs).
  Channel qubit_channel = Channel::kSigmaPlus;

  void validate() const {
    if (pulse_count < 0) throw std::invalid_argument("SequenceSpec: pulse_count must be >= 0");
    if (!(pulse_duration_s > 0.0))
      throw std::invalid_argument("SequenceSpec: pulse_duration_s must be > 0");
  }
};

// Lumped preparation + detection fidelity, applied as a symmetric bit flip.
struct ReadoutModel {
  double p_prep = 1.0;

  void validate() const {
    if (!(p_prep > 0.5) || !(p_prep <= 1.0))
      throw std::invalid_argument("ReadoutModel: p_prep must be in (0.5, 1]");
  }
};

struct TrialResult {
  std::vector<std::uint8_t> bright;  // one bit per ion
  std::uint64_t seed = 0;
  int pulse_count = 0;
};

std::vector<double> random_phases(const SequenceSpec& spec);

// Propagators for a fixed pulse geometry, reused across trials.
class SequenceEngine {
 public:
  SequenceEngine(const TransitionSet& transitions, const RabiMap& rabi, double carrier_hz,
                 double pulse_duration_s, Channel qubit_channel,
                 const CouplingConfig* coupling = nullptr);

  // Applies the full protocol for the given input state: eigenstate runs are
  // the bare random sequence, superposition runs are wrapped in
  // pi/2 -- first half -- echo pi -- second half -- pi/2.
  RegisterState run(InputState input, int pulse_count, Rng& phase_rng) const;

  // Same dynamics with caller-chosen phases (radians).
  RegisterState run_with_phases(InputState input, const std::vector<double>& phases) const;

  int ion_count() const { return static_cast<int>(pulse_unitaries_[0].size()); }

 private:
  void apply_phase_indexed_pulse(RegisterState& state, int phase_index) const;
  void apply_gap(RegisterState& state) const;
  void apply_qubit_rotation(RegisterState& state, double theta, double phase) const;
  RegisterState run_indices(InputState input, const std::vector<int>& indices) const;

  std::array<std::vector<Eigen::Matrix4cd>, 4> pulse_unitaries_;  // [phase index][ion]
  double pulse_duration_s_;
  Channel qubit_channel_;
  CouplingConfig coupling_;
};

// {ceil(N/2) pulses before the echo, floor(N/2) after}.
inline std::pair<int, int> ramsey_split(int pulse_count) {
  return {(pulse_count + 1) / 2, pulse_count / 2};
}

RegisterState run_sequence(const IonChain& chain, const TransitionSet& transitions,
                           const RabiMap& rabi, const SequenceSpec& spec,
                           const CouplingConfig* coupling = nullptr);

// Probability of fluorescence: total population of the F=1 levels.
Eigen::VectorXd bright_probabilities(const RegisterState& state);

TrialResult measure(const RegisterState& state, const ReadoutModel& readout, Rng& rng);

// Per-ion bright probability after one pulse of the given duration at every
// grid frequency (no readout error applied).  Rows follow the grid.
Eigen::MatrixXd spectrum_scan(const IonChain& chain, const TransitionSet& transitions,
                              const RabiMap& rabi, double pulse_duration_s,
                              const Eigen::VectorXd& frequency_grid_hz);

struct BenchmarkPlan {
  std::vector<int> n_values;
  int trials = 100;
  std::uint64_t seed = 0;
  InputState input_state = InputState::kEigenstate;
  Channel qubit_channel = Channel::kSigmaPlus;
  int addressed_ion = 0;
  double carrier_detuning_hz = 0.0;  // relative to the addressed ion's qubit transition
  double pulse_duration_s = 0.0;
  ReadoutModel readout;
  bool sample_readout = true;  // false: accumulate exact bright probabilities
  int threads = 1;
};

struct BenchmarkResult {
  std::vector<int> n_values;
  int trials = 0;
  bool sampled = true;
  // One row per sequence length, one column per ion.
  Eigen::MatrixXd bright_sum;    // sampled: integer counts; exact: summed probabilities
  Eigen::MatrixXd bright_sumsq;  // exact mode: summed squared probabilities
};

// Runs trials x n_values independent randomized sequences.  Results are
// reproducible bit for bit for a fixed (plan, seed) and do not depend on the
// thread count: every trial has its own derived stream and the reduction is
// ordered.
BenchmarkResult run_benchmark(const TransitionSet& transitions, const RabiMap& rabi,
                              const BenchmarkPlan& plan,
                              const CouplingConfig* coupling = nullptr);

}  // namespace iontrap

#endif  // IONTRAP_BENCHMARK_HPP
