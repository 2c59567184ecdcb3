#include "iontrap/optimize.hpp"

#include <cmath>

namespace iontrap {

PulseSolution optimal_duration(double detuning_hz, int harmonic_index) {
  if (harmonic_index < 1) throw std::invalid_argument("optimal_duration: harmonic must be >= 1");
  if (!(detuning_hz > 0.0)) throw std::invalid_argument("optimal_duration: detuning must be > 0");
  PulseSolution s;
  s.harmonic = harmonic_index;
  s.tau_s = std::sqrt(4.0 * harmonic_index * harmonic_index - 1.0) / (2.0 * detuning_hz);
  s.rabi_hz = 1.0 / (2.0 * s.tau_s);
  return s;
}

int harmonic_for_rabi(double detuning_hz, double target_rabi_hz) {
  if (!(detuning_hz > 0.0)) throw std::invalid_argument("harmonic_for_rabi: detuning must be > 0");
  if (!(target_rabi_hz > 0.0))
    throw std::invalid_argument("harmonic_for_rabi: target rabi must be > 0");
  // Omega(k) = delta / sqrt(4 k^2 - 1) is monotone; check the two nearest.
  const double k_real = 0.5 * std::sqrt(detuning_hz * detuning_hz /
                                            (target_rabi_hz * target_rabi_hz) +
                                        1.0);
  const int k_low = std::max(1, static_cast<int>(std::floor(k_real)));
  int best = k_low;
  double best_error = std::abs(optimal_duration(detuning_hz, k_low).rabi_hz - target_rabi_hz);
  const double hi_error =
      std::abs(optimal_duration(detuning_hz, k_low + 1).rabi_hz - target_rabi_hz);
  if (hi_error < best_error) best = k_low + 1;
  return best;
}

BiasResult optimal_bias(const IonChain& chain, double gradient_t_per_m,
                        const PhysicalConstants& constants, int multiplier) {
  constants.validate();
  if (chain.size() < 2)
    throw std::invalid_argument("optimal_bias: needs at least two ions for a detuning comb");
  if (!(gradient_t_per_m > 0.0))
    throw std::invalid_argument("optimal_bias: gradient must be > 0");
  if (multiplier < 1)
    throw std::invalid_argument(
        "optimal_bias: multiplier must be >= 1; zero would park the common resonance on the "
        "first addressing frequency");

  const int pairs = chain.size() - 1;
  Eigen::VectorXd detunings(pairs);
  for (int i = 0; i < pairs; ++i)
    detunings[i] = constants.zeeman_hz_per_t * gradient_t_per_m *
                   (chain.positions_m[i + 1] - chain.positions_m[i]);
  BiasResult result;
  result.delta_tilde_hz = detunings.mean();
  result.residual_hz = detunings.array() - result.delta_tilde_hz;
  result.bias_t = multiplier * result.delta_tilde_hz / constants.zeeman_hz_per_t;
  return result;
}

namespace {

double objective_value(const TransitionSet& transitions, const RabiMap& rabi, double tau_s) {
  double total = 0.0;
  const int n = transitions.size();
  for (int addressed = 0; addressed < n; ++addressed) {
    const double carrier = transitions.sigma_plus_hz[addressed];
    for (int spectator = 0; spectator < n; ++spectator) {
      if (spectator == addressed) continue;
      for (Channel c : {Channel::kPi, Channel::kSigmaPlus, Channel::kSigmaMinus}) {
        const double omega = rabi.channel_rabi(spectator, c);
        if (omega <= 0.0) continue;
        total += crosstalk_probability(
            omega, carrier - transition_frequency(transitions, spectator, c), tau_s);
      }
    }
  }
  return total;
}

}  // namespace

ObjectiveResult crosstalk_objective(const TransitionSet& transitions, const RabiMap& rabi,
                                    const Eigen::VectorXd& tau_grid_s) {
  if (tau_grid_s.size() == 0) throw std::invalid_argument("crosstalk_objective: empty tau grid");
  if ((tau_grid_s.array() <= 0.0).any())
    throw std::invalid_argument("crosstalk_objective: tau grid must be positive");
  if (transitions.size() != rabi.size())
    throw std::invalid_argument("crosstalk_objective: transitions and rabi map sizes differ");

  ObjectiveResult result;
  result.tau_grid_s = tau_grid_s;
  result.total_crosstalk.resize(tau_grid_s.size());
  int best = 0;
  for (int i = 0; i < tau_grid_s.size(); ++i) {
    result.total_crosstalk[i] = objective_value(transitions, rabi, tau_grid_s[i]);
    if (result.total_crosstalk[i] < result.total_crosstalk[best]) best = i;
  }
  result.grid_minimum_tau_s = tau_grid_s[best];
  result.grid_minimum_value = result.total_crosstalk[best];

  // Golden-section refinement inside the bracketing grid neighbors.
  double lo = tau_grid_s[std::max(0, best - 1)];
  double hi = tau_grid_s[std::min<int>(tau_grid_s.size() - 1, best + 1)];
  constexpr double kInvPhi = 0.6180339887498949;
  double a = hi - kInvPhi * (hi - lo);
  double b = lo + kInvPhi * (hi - lo);
  double fa = objective_value(transitions, rabi, a);
  double fb = objective_value(transitions, rabi, b);
  while (hi - lo > 1e-12 * hi) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - kInvPhi * (hi - lo);
      fa = objective_value(transitions, rabi, a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + kInvPhi * (hi - lo);
      fb = objective_value(transitions, rabi, b);
    }
  }
  result.refined_tau_s = 0.5 * (lo + hi);
  result.refined_value = objective_value(transitions, rabi, result.refined_tau_s);
  return result;
}

double scale_error(double base_value, const ScalingLaw& law, double omega_ratio,
                   double gradient_ratio, double secular_ratio) {
  if (!(omega_ratio > 0.0) || !(gradient_ratio > 0.0) || !(secular_ratio > 0.0))
    throw std::invalid_argument("scale_error: ratios must be > 0");
  return base_value * std::pow(omega_ratio, law.omega_exponent) *
         std::pow(gradient_ratio, law.gradient_exponent) *
         std::pow(secular_ratio, law.secular_exponent);
}

}  // namespace iontrap
