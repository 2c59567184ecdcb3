#include "iontrap/dynamics.hpp"

namespace iontrap {

RabiMap RabiMap::uniform(int ion_count, double rabi_hz_value, const Eigen::Vector3d& weights) {
  Eigen::VectorXd v = Eigen::VectorXd::Constant(ion_count, rabi_hz_value);
  return per_ion(v, weights);
}

RabiMap RabiMap::per_ion(const Eigen::VectorXd& rabi_hz_values, const Eigen::Vector3d& weights) {
  RabiMap m;
  m.rabi_hz = rabi_hz_values * weights.transpose();
  m.validate();
  return m;
}

CouplingConfig CouplingConfig::nearest_neighbor(int ion_count, double j_nn_hz) {
  CouplingConfig c;
  c.enabled = true;
  c.j_hz = Eigen::MatrixXd::Zero(ion_count, ion_count);
  for (int i = 0; i + 1 < ion_count; ++i) {
    c.j_hz(i, i + 1) = j_nn_hz;
    c.j_hz(i + 1, i) = j_nn_hz;
  }
  return c;
}

Eigen::Matrix2cd two_level_unitary(double rabi_hz, double detuning_hz, double phase_rad,
                                   double duration_s) {
  if (!(duration_s > 0.0)) throw std::invalid_argument("two_level_unitary: duration_s must be > 0");
  if (rabi_hz < 0.0) throw std::invalid_argument("two_level_unitary: rabi_hz must be >= 0");
  const double omega_r = generalized_rabi_hz(rabi_hz, detuning_hz);
  const double theta = 2.0 * M_PI * omega_r * duration_s;
  if (omega_r == 0.0) return Eigen::Matrix2cd::Identity();
  const double n_perp = rabi_hz / omega_r;
  const double n_z = detuning_hz / omega_r;
  return su2_rotation(theta, n_perp * std::cos(phase_rad), n_perp * std::sin(phase_rad), n_z);
}

double crosstalk_probability(double rabi_hz, double detuning_hz, double duration_s) {
  if (!(duration_s > 0.0))
    throw std::invalid_argument("crosstalk_probability: duration_s must be > 0");
  const double omega_r = generalized_rabi_hz(rabi_hz, detuning_hz);
  if (omega_r == 0.0) return 0.0;
  const double amplitude = rabi_hz / omega_r;
  const double s = std::sin(M_PI * omega_r * duration_s);
  return amplitude * amplitude * s * s;
}

Eigen::Matrix4cd ion_propagator(const Pulse& pulse, const TransitionSet& transitions,
                                const RabiMap& rabi, int ion) {
  pulse.validate();
  // Rotating frame at the carrier with one RWA per channel: diagonal detunings
  // -2 pi (carrier - transition), drive pi Omega_c e^{i phase} on |c><0|.
  Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
  const std::complex<double> drive_phase(std::cos(pulse.phase_rad), std::sin(pulse.phase_rad));
  for (Channel c : {Channel::kPi, Channel::kSigmaPlus, Channel::kSigmaMinus}) {
    const int level = excited_level(c);
    const double detuning_hz = pulse.carrier_hz - transition_frequency(transitions, ion, c);
    h(level, level) = -2.0 * M_PI * detuning_hz;
    const double half_rabi_ang = M_PI * rabi.channel_rabi(ion, c);
    h(level, kState0) = half_rabi_ang * drive_phase;
    h(kState0, level) = half_rabi_ang * std::conj(drive_phase);
  }
  return hermitian_propagator(h, pulse.duration_s);
}

RegisterState apply_pulse(const RegisterState& state, const Pulse& pulse,
                          const TransitionSet& transitions, const RabiMap& rabi) {
  const int n = state.ion_count();
  if (transitions.size() != n || rabi.size() != n)
    throw std::invalid_argument("apply_pulse: state, transitions and rabi map sizes differ");
  RegisterState out;
  out.amplitudes.resize(4, n);
  for (int ion = 0; ion < n; ++ion)
    out.amplitudes.col(ion) = ion_propagator(pulse, transitions, rabi, ion) * state.amplitudes.col(ion);
  return out;
}

void apply_coupling_phases(RegisterState& state, const Eigen::MatrixXd& j_hz,
                           double duration_s) {
  const int n = state.ion_count();
  if (j_hz.rows() != n || j_hz.cols() != n)
    throw std::invalid_argument("apply_coupling_phases: coupling matrix size mismatch");
  Eigen::VectorXd polarization(n);
  for (int j = 0; j < n; ++j)
    polarization[j] =
        std::norm(state.amplitudes(kState0, j)) - std::norm(state.amplitudes(kState1, j));
  for (int i = 0; i < n; ++i) {
    double phase = 0.0;
    for (int j = 0; j < n; ++j)
      phase += j_coupling_phase_rad(j_hz(i, j), duration_s) * polarization[j];
    const std::complex<double> rot(std::cos(phase), -std::sin(phase));
    state.amplitudes(kState1, i) *= rot;
    state.amplitudes(kStateMinus1, i) *= std::conj(rot);
  }
}

double light_shift_phase_rad(double rabi_hz, double detuning_hz, double duration_s) {
  if (detuning_hz == 0.0)
    throw std::domain_error("light_shift_phase_rad: detuning must be nonzero");
  return 2.0 * M_PI * rabi_hz * rabi_hz / (2.0 * detuning_hz) * duration_s;
}

double dephasing_error(double phase_rad) { return 0.5 * (1.0 - std::cos(phase_rad)); }

double sideband_crosstalk(const SidebandConfig& config, double rabi_hz, double carrier_detuning_hz,
                          double duration_s) {
  config.validate();
  const double eta = config.effective_lamb_dicke;
  if (eta == 0.0) return 0.0;
  const double nbar = config.mean_phonon_number;
  // Geometric distribution p(n) = (nbar/(nbar+1))^n / (nbar+1).
  const double ratio = nbar / (nbar + 1.0);
  const double red_detuning = carrier_detuning_hz - config.mode_frequency_hz;
  const double blue_detuning = carrier_detuning_hz + config.mode_frequency_hz;

  double total = 0.0;
  double weight = 1.0 / (nbar + 1.0);
  constexpr int kMaxTerms = 100000;
  const int min_terms = static_cast<int>(10.0 * (nbar + 1.0));
  for (int n = 0; n < kMaxTerms; ++n) {
    const double red = crosstalk_probability(eta * rabi_hz * std::sqrt(double(n)), red_detuning,
                                             duration_s);
    const double blue = crosstalk_probability(eta * rabi_hz * std::sqrt(double(n + 1)),
                                              blue_detuning, duration_s);
    const double term = weight * (red + blue);
    total += term;
    if (n >= min_terms && term < 1e-13 * total) break;
    weight *= ratio;
  }
  return total;
}

}  // namespace iontrap
