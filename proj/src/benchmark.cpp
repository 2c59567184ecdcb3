#include "iontrap/benchmark.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <thread>

namespace iontrap {

namespace {

Rng phase_stream(std::uint64_t seed) { return derive_stream(seed, 0, StreamPurpose::kPulsePhases); }

void warn_if_spectator_only(const TransitionSet& transitions, const RabiMap& rabi,
                            double carrier_hz) {
  double max_rabi = rabi.rabi_hz.maxCoeff();
  if (max_rabi <= 0.0) return;
  double min_detuning = std::numeric_limits<double>::infinity();
  for (int ion = 0; ion < transitions.size(); ++ion)
    for (Channel c : {Channel::kPi, Channel::kSigmaPlus, Channel::kSigmaMinus})
      min_detuning = std::min(min_detuning,
                              std::abs(carrier_hz - transition_frequency(transitions, ion, c)));
  if (min_detuning > 1e3 * max_rabi)
    std::fprintf(stderr,
                 "iontrap: carrier %.6g Hz is more than 1000 Rabi frequencies from every "
                 "transition; running as a spectator-only sequence\n",
                 carrier_hz);
}

}  // namespace

std::vector<double> random_phases(const SequenceSpec& spec) {
  spec.validate();
  Rng rng = phase_stream(spec.seed);
  std::vector<double> phases(spec.pulse_count);
  for (double& p : phases) p = rng.next_index4() * (M_PI / 2.0);
  return phases;
}

SequenceEngine::SequenceEngine(const TransitionSet& transitions, const RabiMap& rabi,
                               double carrier_hz, double pulse_duration_s, Channel qubit_channel,
                               const CouplingConfig* coupling)
    : pulse_duration_s_(pulse_duration_s), qubit_channel_(qubit_channel) {
  if (transitions.size() != rabi.size())
    throw std::invalid_argument("SequenceEngine: transitions and rabi map sizes differ");
  warn_if_spectator_only(transitions, rabi, carrier_hz);
  const int n = transitions.size();
  for (int k = 0; k < 4; ++k) {
    Pulse pulse{carrier_hz, k * (M_PI / 2.0), pulse_duration_s};
    pulse_unitaries_[k].reserve(n);
    for (int ion = 0; ion < n; ++ion)
      pulse_unitaries_[k].push_back(ion_propagator(pulse, transitions, rabi, ion));
  }
  if (coupling != nullptr && coupling->enabled) {
    coupling->validate();
    if (coupling->j_hz.rows() != n)
      throw std::invalid_argument("SequenceEngine: coupling matrix size differs from register");
    coupling_ = *coupling;
  }
}

void SequenceEngine::apply_phase_indexed_pulse(RegisterState& state, int phase_index) const {
  const auto& us = pulse_unitaries_[phase_index];
  for (int ion = 0; ion < state.ion_count(); ++ion)
    state.amplitudes.col(ion) = us[ion] * state.amplitudes.col(ion);
}

// Idle gaps are identity in each ion's own rotating frame apart from the
// static spin-spin coupling.
void SequenceEngine::apply_gap(RegisterState& state) const {
  if (!coupling_.enabled) return;
  apply_coupling_phases(state, coupling_.j_hz, pulse_duration_s_);
}

void SequenceEngine::apply_qubit_rotation(RegisterState& state, double theta, double phase) const {
  const int upper = excited_level(qubit_channel_);
  const Eigen::Matrix2cd u = su2_rotation(theta, std::cos(phase), std::sin(phase), 0.0);
  for (int ion = 0; ion < state.ion_count(); ++ion) {
    const std::complex<double> a0 = state.amplitudes(kState0, ion);
    const std::complex<double> a1 = state.amplitudes(upper, ion);
    state.amplitudes(kState0, ion) = u(0, 0) * a0 + u(0, 1) * a1;
    state.amplitudes(upper, ion) = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

RegisterState SequenceEngine::run_indices(InputState input, const std::vector<int>& indices) const {
  RegisterState state = RegisterState::ground(ion_count());
  const int n_pulses = static_cast<int>(indices.size());
  if (input == InputState::kEigenstate) {
    for (int k = 0; k < n_pulses; ++k) {
      apply_phase_indexed_pulse(state, indices[k]);
      apply_gap(state);
    }
    return state;
  }
  // Ramsey wrapper: the echo cancels phase accumulation that is constant
  // across the two halves, including the static light shift.
  const auto [before, after] = ramsey_split(n_pulses);
  apply_qubit_rotation(state, M_PI / 2.0, 0.0);
  for (int k = 0; k < before; ++k) {
    apply_phase_indexed_pulse(state, indices[k]);
    apply_gap(state);
  }
  apply_qubit_rotation(state, M_PI, M_PI / 2.0);
  for (int k = before; k < n_pulses; ++k) {
    apply_phase_indexed_pulse(state, indices[k]);
    apply_gap(state);
  }
  apply_qubit_rotation(state, M_PI / 2.0, 0.0);
  return state;
}

RegisterState SequenceEngine::run(InputState input, int pulse_count, Rng& phase_rng) const {
  std::vector<int> indices(pulse_count);
  for (int& i : indices) i = phase_rng.next_index4();
  return run_indices(input, indices);
}

RegisterState SequenceEngine::run_with_phases(InputState input,
                                              const std::vector<double>& phases) const {
  std::vector<int> indices;
  indices.reserve(phases.size());
  for (double p : phases) {
    const double q = normalize_phase(p) / (M_PI / 2.0);
    const int idx = static_cast<int>(std::lround(q)) % 4;
    if (std::abs(q - std::lround(q)) > 1e-9)
      throw std::invalid_argument("run_with_phases: phases must be multiples of pi/2");
    indices.push_back(idx);
  }
  return run_indices(input, indices);
}

RegisterState run_sequence(const IonChain& chain, const TransitionSet& transitions,
                           const RabiMap& rabi, const SequenceSpec& spec,
                           const CouplingConfig* coupling) {
  spec.validate();
  if (chain.size() != transitions.size())
    throw std::invalid_argument("run_sequence: chain and transitions sizes differ");
  if (spec.addressed_ion < 0 || spec.addressed_ion >= chain.size())
    throw std::invalid_argument("run_sequence: addressed_ion out of range");
  SequenceEngine engine(transitions, rabi, spec.carrier_hz, spec.pulse_duration_s,
                        spec.qubit_channel, coupling);
  Rng rng = phase_stream(spec.seed);
  return engine.run(spec.input_state, spec.pulse_count, rng);
}

Eigen::VectorXd bright_probabilities(const RegisterState& state) {
  const int n = state.ion_count();
  Eigen::VectorXd p(n);
  for (int ion = 0; ion < n; ++ion)
    p[ion] = std::clamp(1.0 - std::norm(state.amplitudes(kState0, ion)), 0.0, 1.0);
  return p;
}

TrialResult measure(const RegisterState& state, const ReadoutModel& readout, Rng& rng) {
  readout.validate();
  const Eigen::VectorXd p = bright_probabilities(state);
  TrialResult result;
  result.bright.resize(p.size());
  const double flip = 1.0 - readout.p_prep;
  for (int ion = 0; ion < p.size(); ++ion) {
    bool bright = rng.next_double() < p[ion];
    if (rng.next_double() < flip) bright = !bright;
    result.bright[ion] = bright ? 1 : 0;
  }
  return result;
}

Eigen::MatrixXd spectrum_scan(const IonChain& chain, const TransitionSet& transitions,
                              const RabiMap& rabi, double pulse_duration_s,
                              const Eigen::VectorXd& frequency_grid_hz) {
  if (frequency_grid_hz.size() == 0)
    throw std::invalid_argument("spectrum_scan: empty frequency grid");
  if (chain.size() != transitions.size())
    throw std::invalid_argument("spectrum_scan: chain and transitions sizes differ");
  const int n = transitions.size();
  Eigen::MatrixXd excitation(frequency_grid_hz.size(), n);
  for (int g = 0; g < frequency_grid_hz.size(); ++g) {
    const Pulse pulse{frequency_grid_hz[g], 0.0, pulse_duration_s};
    RegisterState state = apply_pulse(RegisterState::ground(n), pulse, transitions, rabi);
    excitation.row(g) = bright_probabilities(state).transpose();
  }
  return excitation;
}

BenchmarkResult run_benchmark(const TransitionSet& transitions, const RabiMap& rabi,
                              const BenchmarkPlan& plan, const CouplingConfig* coupling) {
  if (plan.trials <= 0) throw std::invalid_argument("run_benchmark: trials must be > 0");
  if (plan.n_values.empty()) throw std::invalid_argument("run_benchmark: n_values is empty");
  if (plan.addressed_ion < 0 || plan.addressed_ion >= transitions.size())
    throw std::invalid_argument("run_benchmark: addressed_ion out of range");
  plan.readout.validate();

  const double carrier_hz =
      transition_frequency(transitions, plan.addressed_ion, plan.qubit_channel) +
      plan.carrier_detuning_hz;
  const SequenceEngine engine(transitions, rabi, carrier_hz, plan.pulse_duration_s,
                              plan.qubit_channel, coupling);
  const int n_ions = engine.ion_count();
  const int n_lengths = static_cast<int>(plan.n_values.size());

  // Per-trial buffer, reduced in trial order afterwards so the result is
  // independent of the thread partition.
  std::vector<Eigen::MatrixXd> per_trial(n_lengths,
                                         Eigen::MatrixXd::Zero(n_ions, plan.trials));

  auto worker = [&](int trial_begin, int trial_end) {
    for (int trial = trial_begin; trial < trial_end; ++trial) {
      for (int li = 0; li < n_lengths; ++li) {
        const std::uint64_t stream_id =
            static_cast<std::uint64_t>(li) * static_cast<std::uint64_t>(plan.trials) + trial;
        Rng phase_rng = derive_stream(plan.seed, stream_id, StreamPurpose::kPulsePhases);
        const RegisterState state = engine.run(plan.input_state, plan.n_values[li], phase_rng);
        if (plan.sample_readout) {
          Rng meas_rng = derive_stream(plan.seed, stream_id, StreamPurpose::kMeasurement);
          const TrialResult r = measure(state, plan.readout, meas_rng);
          for (int ion = 0; ion < n_ions; ++ion) per_trial[li](ion, trial) = r.bright[ion];
        } else {
          per_trial[li].col(trial) = bright_probabilities(state);
        }
      }
    }
  };

  const int threads = std::max(1, plan.threads);
  if (threads == 1) {
    worker(0, plan.trials);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (plan.trials + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int begin = t * chunk;
      const int end = std::min(plan.trials, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  BenchmarkResult result;
  result.n_values = plan.n_values;
  result.trials = plan.trials;
  result.sampled = plan.sample_readout;
  result.bright_sum = Eigen::MatrixXd::Zero(n_lengths, n_ions);
  result.bright_sumsq = Eigen::MatrixXd::Zero(n_lengths, n_ions);
  for (int li = 0; li < n_lengths; ++li) {
    for (int trial = 0; trial < plan.trials; ++trial) {
      result.bright_sum.row(li) += per_trial[li].col(trial).transpose();
      result.bright_sumsq.row(li) += per_trial[li].col(trial).array().square().matrix().transpose();
    }
  }
  return result;
}

}  // namespace iontrap
