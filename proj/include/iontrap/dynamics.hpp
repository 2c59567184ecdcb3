#ifndef IONTRAP_DYNAMICS_HPP
#define IONTRAP_DYNAMICS_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "iontrap/chain.hpp"

namespace iontrap {

// Amplitude ordering of the four 2S1/2 hyperfine levels.
enum Level : int {
  kState0 = 0,       // |0>  = |F=0>
  kState0Prime = 1,  // |0'> = |F=1, mF=0>
  kState1 = 2,       // |1>  = |F=1, mF=+1>
  kStateMinus1 = 3,  // |-1> = |F=1, mF=-1>
};

// Drive channels coupling |0> to one excited level each.
enum class Channel : int { kPi = 0, kSigmaPlus = 1, kSigmaMinus = 2 };

constexpr int excited_level(Channel c) { return static_cast<int>(c) + 1; }

inline double transition_frequency(const TransitionSet& t, int ion, Channel c) {
  switch (c) {
    case Channel::kPi: return t.pi_hz[ion];
    case Channel::kSigmaPlus: return t.sigma_plus_hz[ion];
    case Channel::kSigmaMinus: return t.sigma_minus_hz[ion];
  }
  throw std::invalid_argument("transition_frequency: bad channel");
}

// One rectangular microwave pulse.  The carrier is an ordinary frequency (Hz).
struct Pulse {
  double carrier_hz = 0.0;
  double phase_rad = 0.0;
  double duration_s = 0.0;

  void validate() const {
    if (!(duration_s > 0.0)) throw std::invalid_argument("Pulse: duration_s must be > 0");
  }
};

inline double normalize_phase(double phase_rad) {
  double p = std::fmod(phase_rad, 2.0 * M_PI);
  if (p < 0.0) p += 2.0 * M_PI;
  return p;
}

// Resonant Rabi frequencies (Hz), one row per ion, columns (pi, sigma+, sigma-).
struct RabiMap {
  Eigen::Matrix<double, Eigen::Dynamic, 3> rabi_hz;

  int size() const { return static_cast<int>(rabi_hz.rows()); }
  double channel_rabi(int ion, Channel c) const { return rabi_hz(ion, static_cast<int>(c)); }

  static RabiMap uniform(int ion_count, double rabi_hz_value,
                         const Eigen::Vector3d& weights = Eigen::Vector3d::Ones());
  static RabiMap per_ion(const Eigen::VectorXd& rabi_hz_values,
                         const Eigen::Vector3d& weights = Eigen::Vector3d::Ones());

  void validate() const {
    if ((rabi_hz.array() < 0.0).any())
      throw std::invalid_argument("RabiMap: Rabi frequencies must be >= 0");
  }
};

// Product state of the register: one 4-amplitude column per ion.
struct RegisterState {
  Eigen::Matrix4Xcd amplitudes;

  int ion_count() const { return static_cast<int>(amplitudes.cols()); }

  static RegisterState ground(int ion_count) {
    RegisterState s;
    s.amplitudes = Eigen::Matrix4Xcd::Zero(4, ion_count);
    s.amplitudes.row(kState0).setOnes();
    return s;
  }

  double max_norm_error() const {
    return (amplitudes.colwise().squaredNorm().array() - 1.0).abs().maxCoeff();
  }
};

// Static spin-spin coupling constants (Hz), symmetric with zero diagonal.
struct CouplingConfig {
  bool enabled = false;
  Eigen::MatrixXd j_hz;

  void validate() const {
    if (!enabled) return;
    if (j_hz.rows() != j_hz.cols()) throw std::invalid_argument("CouplingConfig: j_hz not square");
    if (!j_hz.isApprox(j_hz.transpose(), 1e-12))
      throw std::invalid_argument("CouplingConfig: j_hz not symmetric");
    if (j_hz.diagonal().cwiseAbs().maxCoeff() != 0.0)
      throw std::invalid_argument("CouplingConfig: j_hz diagonal must be zero");
  }

  static CouplingConfig nearest_neighbor(int ion_count, double j_nn_hz);
};

// Motional sideband channel of the axial center-of-mass mode.
struct SidebandConfig {
  double mode_frequency_hz = 124e3;
  double mean_phonon_number = 150.0;
  double effective_lamb_dicke = 0.0;  // 0 disables the channel

  void validate() const {
    if (mean_phonon_number < 0.0)
      throw std::invalid_argument("SidebandConfig: mean_phonon_number must be >= 0");
    if (effective_lamb_dicke < 0.0)
      throw std::invalid_argument("SidebandConfig: effective_lamb_dicke must be >= 0");
  }
};

// sqrt(Omega^2 + Delta^2), both in Hz.
inline double generalized_rabi_hz(double rabi_hz, double detuning_hz) {
  return std::hypot(rabi_hz, detuning_hz);
}

// R_n(theta) = exp(-i theta/2 n.sigma) with the axis azimuth in the x-y plane
// set by phase and the z component by the detuning.
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, 2, 2> su2_rotation(Scalar theta, Scalar axis_x, Scalar axis_y,
                                                       Scalar axis_z) {
  using C = std::complex<Scalar>;
  const Scalar c = std::cos(theta / 2);
  const Scalar s = std::sin(theta / 2);
  Eigen::Matrix<C, 2, 2> u;
  u(0, 0) = C(c, -s * axis_z);
  u(0, 1) = C(-s * axis_y, -s * axis_x);
  u(1, 0) = C(s * axis_y, -s * axis_x);
  u(1, 1) = C(c, s * axis_z);
  return u;
}

// exp(-i H t) for Hermitian H (angular units, rad/s) via eigendecomposition.
template <typename Derived>
auto hermitian_propagator(const Eigen::MatrixBase<Derived>& h_rad_per_s, double duration_s) {
  using Matrix = typename Derived::PlainObject;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h_rad_per_s);
  using C = typename Matrix::Scalar;
  const auto phases =
      (C(0, -1) * es.eigenvalues().template cast<C>() * duration_s).array().exp().matrix();
  return (es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint()).eval();
}

Eigen::Matrix2cd two_level_unitary(double rabi_hz, double detuning_hz, double phase_rad,
                                   double duration_s);

// Excitation probability of one detuned rectangular pulse,
// (Omega/Omega_R)^2 sin^2(pi Omega_R tau).
double crosstalk_probability(double rabi_hz, double detuning_hz, double duration_s);

// Rotating-frame propagator of one ion's 4-level manifold under a single tone.
Eigen::Matrix4cd ion_propagator(const Pulse& pulse, const TransitionSet& transitions,
                                const RabiMap& rabi, int ion);

RegisterState apply_pulse(const RegisterState& state, const Pulse& pulse,
                          const TransitionSet& transitions, const RabiMap& rabi);

// Light-shift phase 2 pi Omega^2/(2 Delta) tau, signed by the detuning.
double light_shift_phase_rad(double rabi_hz, double detuning_hz, double duration_s);

// Infidelity 1 - (1 + cos(phase))/2 of a superposition dephased by phase.
double dephasing_error(double phase_rad);

inline double j_coupling_phase_rad(double j_hz, double duration_s) {
  return 2.0 * M_PI * j_hz * duration_s;
}

// Mean-field action of the static spin-spin coupling over one idle interval:
// conjugate phases on the two field-sensitive levels, each ion weighted by
// its partners' qubit polarization |<0>|^2 - |<1>|^2.
void apply_coupling_phases(RegisterState& state, const Eigen::MatrixXd& j_hz,
                           double duration_s);

// Thermal average of the sideband excitation over a geometric phonon
// distribution with the configured mean occupation.
double sideband_crosstalk(const SidebandConfig& config, double rabi_hz, double carrier_detuning_hz,
                          double duration_s);

}  // namespace iontrap

#endif  // IONTRAP_DYNAMICS_HPP
