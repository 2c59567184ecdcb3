#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "iontrap/dynamics.hpp"
#include "iontrap/rng.hpp"

using namespace iontrap;

namespace {

TransitionSet single_ion_transitions(double pi_hz, double zeeman_shift_hz) {
  TransitionSet t;
  t.pi_hz = Eigen::VectorXd::Constant(1, pi_hz);
  t.sigma_plus_hz = Eigen::VectorXd::Constant(1, pi_hz + zeeman_shift_hz);
  t.sigma_minus_hz = Eigen::VectorXd::Constant(1, pi_hz - zeeman_shift_hz);
  return t;
}

double max_entry_norm(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("generalized Rabi frequency") {
  CHECK(generalized_rabi_hz(0.0, -3.5e6) == 3.5e6);
  CHECK(generalized_rabi_hz(20e3, 0.0) == 20e3);
  CHECK(generalized_rabi_hz(60.8e3, 2.000e6) ==
        doctest::Approx(2000923.9465806788).epsilon(1e-12));
}

TEST_CASE("two-level unitary is unitary and composes over duration") {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const double rabi = 1e5 * rng.next_double();
    const double detuning = 4e6 * (rng.next_double() - 0.5);
    const double phase = 2.0 * M_PI * rng.next_double();
    const double t1 = 1e-6 + 3e-5 * rng.next_double();
    const double t2 = 1e-6 + 3e-5 * rng.next_double();
    const Eigen::Matrix2cd u1 = two_level_unitary(rabi, detuning, phase, t1);
    CHECK(max_entry_norm(u1.adjoint() * u1 - Eigen::Matrix2cd::Identity()) < 1e-12);
    const Eigen::Matrix2cd u2 = two_level_unitary(rabi, detuning, phase, t2);
    const Eigen::Matrix2cd u12 = two_level_unitary(rabi, detuning, phase, t1 + t2);
    CHECK(max_entry_norm(u2 * u1 - u12) < 1e-10);
  }
}

TEST_CASE("resonant pi pulse transfers all population") {
  const double rabi = 20e3;
  const double tau = 0.5 / rabi;
  const Eigen::Matrix2cd u = two_level_unitary(rabi, 0.0, 0.0, tau);
  CHECK(std::norm(u(1, 0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("full revolutions leave the state unchanged up to global phase") {
  const double rabi = 5e3;
  const double detuning = 2e6;
  const double omega_r = generalized_rabi_hz(rabi, detuning);
  const double tau = 40.0 / omega_r;  // integer revolutions
  const Eigen::Matrix2cd u = two_level_unitary(rabi, detuning, 0.7, tau);
  const std::complex<double> phase = u(0, 0) / std::abs(u(0, 0));
  const double bound = std::pow(rabi / detuning, 2);
  CHECK(max_entry_norm(u / phase - Eigen::Matrix2cd::Identity()) < bound);
}

TEST_CASE("excitation probability of a detuned pulse") {
  // Resonant pi pulse.
  CHECK(crosstalk_probability(20e3, 0.0, 0.5 / 20e3) == doctest::Approx(1.0).epsilon(1e-12));
  // Integer revolutions: suppressed far below the (Omega/Omega_R)^2 envelope.
  const double omega_r = generalized_rabi_hz(20e3, 2e6);
  const double envelope = std::pow(20e3 / omega_r, 2);
  CHECK(crosstalk_probability(20e3, 2e6, 50.0 / omega_r) < envelope * 1e-4);
  // The byte working point.
  const double c = crosstalk_probability(20e3, 1.852e6, 25e-6);
  CHECK(c == doctest::Approx(7.725870925951288e-5).epsilon(1e-12));
  CHECK(c > 6.3e-5);  // measured band 7.6(1.3) x 10^-5
  CHECK(c < 8.9e-5);
}

TEST_CASE("closed form matches the unitary matrix element everywhere") {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const double rabi = 1e5 * rng.next_double();
    const double detuning = 4e6 * (rng.next_double() - 0.5);
    const double tau = 1e-6 + 4e-5 * rng.next_double();
    const Eigen::Matrix2cd u = two_level_unitary(rabi, detuning, 2.0 * M_PI * rng.next_double(), tau);
    CHECK(std::abs(std::norm(u(1, 0)) - crosstalk_probability(rabi, detuning, tau)) < 1e-12);
  }
}

TEST_CASE("excitation is periodic in tau with period 1/Omega_R") {
  const double rabi = 60.8e3;
  const double detuning = 2e6;
  const double omega_r = generalized_rabi_hz(rabi, detuning);
  const double period = 1.0 / omega_r;
  for (double tau : {7.6e-6, 8.0e-6, 8.4e-6})
    CHECK(crosstalk_probability(rabi, detuning, tau + period) ==
          doctest::Approx(crosstalk_probability(rabi, detuning, tau)).epsilon(1e-9));

  // Fidelity maxima (excitation minima) spaced by about 1/Delta = 0.5 us.
  double previous_minimum = 0.0;
  std::vector<double> minima;
  const double step = 1e-9;
  for (double tau = 7.4e-6; tau < 8.6e-6; tau += step) {
    const double left = crosstalk_probability(rabi, detuning, tau - step);
    const double mid = crosstalk_probability(rabi, detuning, tau);
    const double right = crosstalk_probability(rabi, detuning, tau + step);
    if (mid < left && mid < right) minima.push_back(tau);
  }
  REQUIRE(minima.size() >= 2);
  for (std::size_t i = 1; i < minima.size(); ++i) {
    const double spacing = minima[i] - minima[i - 1];
    CHECK(spacing == doctest::Approx(period).epsilon(0.01));
    CHECK(spacing == doctest::Approx(0.5e-6).epsilon(0.02));
  }
  (void)previous_minimum;
}

TEST_CASE("zero drive leaves populations frozen") {
  const TransitionSet t = single_ion_transitions(12.6428e9, 12e6);
  const RabiMap rabi = RabiMap::uniform(1, 0.0);
  RegisterState state = RegisterState::ground(1);
  state.amplitudes(kState0, 0) = std::sqrt(0.5);
  state.amplitudes(kState1, 0) = std::complex<double>(0.0, std::sqrt(0.5));
  const Pulse pulse{t.pi_hz[0] + 2e6, 0.3, 25e-6};
  const RegisterState out = apply_pulse(state, pulse, t, rabi);
  for (int level = 0; level < 4; ++level)
    CHECK(std::abs(out.amplitudes(level, 0)) ==
          doctest::Approx(std::abs(state.amplitudes(level, 0))).epsilon(1e-12));
}

TEST_CASE("resonant sigma+ pulse reduces to the two-level pi pulse") {
  const TransitionSet t = single_ion_transitions(12.6428e9, 12e6);
  const RabiMap rabi = RabiMap::uniform(1, 20e3);
  const Pulse pulse{t.sigma_plus_hz[0], 0.0, 0.5 / 20e3};
  const RegisterState out = apply_pulse(RegisterState::ground(1), pulse, t, rabi);
  const double p1 = std::norm(out.amplitudes(kState1, 0));
  CHECK(p1 > 0.9999);
}

TEST_CASE("four-level spectator excitation matches the two-level closed form") {
  // Spectator 1.852 MHz below the carrier, sigma channels pushed far by bias.
  const TransitionSet t = single_ion_transitions(12.6428e9, 12e6);
  const RabiMap rabi = RabiMap::uniform(1, 20e3);
  const double carrier = t.sigma_plus_hz[0] + 1.852e6;
  const Pulse pulse{carrier, 0.0, 25e-6};
  const RegisterState out = apply_pulse(RegisterState::ground(1), pulse, t, rabi);
  const double p1 = std::norm(out.amplitudes(kState1, 0));
  const double closed_form = crosstalk_probability(20e3, 1.852e6, 25e-6);
  CHECK(std::abs(p1 - closed_form) / closed_form < 0.05);
}

TEST_CASE("norm is preserved over ten thousand composed pulses") {
  const TransitionSet t = single_ion_transitions(12.6428e9, 12e6);
  const RabiMap rabi = RabiMap::uniform(1, 20e3);
  const Pulse pulse{t.sigma_plus_hz[0] + 1.852e6, M_PI / 2.0, 25e-6};
  const Eigen::Matrix4cd u = ion_propagator(pulse, t, rabi, 0);
  CHECK(max_entry_norm(u.adjoint() * u - Eigen::Matrix4cd::Identity()) < 1e-12);
  RegisterState state = RegisterState::ground(1);
  for (int k = 0; k < 10000; ++k) state.amplitudes.col(0) = u * state.amplitudes.col(0);
  CHECK(state.max_norm_error() < 1e-10);
}

TEST_CASE("light shift phase") {
  const double rate_hz = light_shift_phase_rad(20e3, 2e6, 1.0) / (2.0 * M_PI);
  CHECK(rate_hz == doctest::Approx(100.0).epsilon(1e-12));  // measured 98(6) Hz
  CHECK(light_shift_phase_rad(0.0, 2e6, 25e-6) == 0.0);
  CHECK(light_shift_phase_rad(20e3, 2e6, 25e-6) == doctest::Approx(0.0157).epsilon(1e-3));
  CHECK(light_shift_phase_rad(20e3, -2e6, 25e-6) ==
        doctest::Approx(-0.0157).epsilon(1e-3));
  CHECK_THROWS_AS(light_shift_phase_rad(20e3, 0.0, 25e-6), std::domain_error);
}

TEST_CASE("dephasing error from a phase shift") {
  CHECK(dephasing_error(0.0) == 0.0);
  CHECK(dephasing_error(M_PI) == doctest::Approx(1.0).epsilon(1e-15));
  // 98 Hz light shift over a 25 us pi pulse.
  const double phase = 2.0 * M_PI * 98.0 * 25e-6;
  CHECK(dephasing_error(phase) == doctest::Approx(5.9e-5).epsilon(0.01));
  // Small-angle expansion (phase/2)^2 to fourth order.
  CHECK(dephasing_error(1e-3) == doctest::Approx(2.5e-7).epsilon(1e-6));
}

TEST_CASE("J-coupling phase is linear and reproduces the error budget") {
  CHECK(j_coupling_phase_rad(0.0, 20e-6) == 0.0);
  const double phase = j_coupling_phase_rad(33.0, 20e-6);
  CHECK(phase == doctest::Approx(4.15e-3).epsilon(1e-3));
  CHECK(dephasing_error(phase) == doctest::Approx(4.3e-6).epsilon(0.01));
  CHECK(j_coupling_phase_rad(66.0, 20e-6) == doctest::Approx(2.0 * phase).epsilon(1e-15));
}

TEST_CASE("sideband channel disabled and vacuum limits") {
  SidebandConfig config;
  config.effective_lamb_dicke = 0.0;
  CHECK(sideband_crosstalk(config, 20e3, 1.852e6, 25e-6) == 0.0);

  config.effective_lamb_dicke = 0.01;
  config.mean_phonon_number = 0.0;
  // Vacuum: the red sideband (sqrt(n)) cannot contribute.
  const double expected = crosstalk_probability(0.01 * 20e3, 1.852e6 + 124e3, 25e-6);
  CHECK(sideband_crosstalk(config, 20e3, 1.852e6, 25e-6) ==
        doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("thermal sideband sum matches a Monte Carlo phonon-sampling oracle") {
  SidebandConfig config;
  config.effective_lamb_dicke = 0.01;
  config.mean_phonon_number = 150.0;
  config.mode_frequency_hz = 124e3;
  const double rabi = 20e3;
  const double detuning = 1.852e6;
  const double tau = 25e-6;
  const double series = sideband_crosstalk(config, rabi, detuning, tau);

  Rng rng = derive_stream(2024, 0, StreamPurpose::kSynthesis);
  const double ratio = config.mean_phonon_number / (config.mean_phonon_number + 1.0);
  double sum = 0.0;
  const int samples = 200000;
  for (int s = 0; s < samples; ++s) {
    const double u = rng.next_double();
    const int n = static_cast<int>(std::floor(std::log1p(-u) / std::log(ratio)));
    sum += crosstalk_probability(config.effective_lamb_dicke * rabi * std::sqrt(double(n)),
                                 detuning - config.mode_frequency_hz, tau);
    sum += crosstalk_probability(config.effective_lamb_dicke * rabi * std::sqrt(double(n + 1)),
                                 detuning + config.mode_frequency_hz, tau);
  }
  const double monte_carlo = sum / samples;
  CHECK(std::abs(series - monte_carlo) / series < 0.01);
}

TEST_CASE("rabi map rejects negative amplitudes, phases normalize") {
  Eigen::VectorXd rabi(2);
  rabi << 20e3, -1.0;
  CHECK_THROWS_AS(RabiMap::per_ion(rabi), std::invalid_argument);
  CHECK(normalize_phase(-M_PI / 2.0) == doctest::Approx(1.5 * M_PI).epsilon(1e-15));
  CHECK(normalize_phase(2.0 * M_PI) == 0.0);
}
