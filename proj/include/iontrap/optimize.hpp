#ifndef IONTRAP_OPTIMIZE_HPP
#define IONTRAP_OPTIMIZE_HPP

#include <Eigen/Dense>
#include <stdexcept>

#include "iontrap/chain.hpp"
#include "iontrap/dynamics.hpp"

namespace iontrap {

struct PulseSolution {
  double tau_s = 0.0;
  double rabi_hz = 0.0;
  int harmonic = 0;
};

// Exact simultaneous solution of "spectators complete k full revolutions"
// (generalized Rabi frequency, not the bare detuning) and "pi pulse on the
// addressed ion": tau = sqrt(4 k^2 - 1)/(2 delta), Omega = 1/(2 tau).
PulseSolution optimal_duration(double detuning_hz, int harmonic_index);

// The harmonic whose pi-pulse Rabi frequency comes closest to the target.
int harmonic_for_rabi(double detuning_hz, double target_rabi_hz);

struct BiasResult {
  double bias_t = 0.0;          // field at the first ion
  double delta_tilde_hz = 0.0;  // mean next-neighbor detuning
  Eigen::VectorXd residual_hz;  // per-pair deviation from delta_tilde
};

// Bias field making the |0>-|0'> resonance sit multiplier * delta_tilde below
// the first ion's addressing frequency, so the common resonance joins the
// addressing comb.  Reports per-pair residuals when the next-neighbor
// detunings are not uniform.
BiasResult optimal_bias(const IonChain& chain, double gradient_t_per_m,
                        const PhysicalConstants& constants, int multiplier);

struct ObjectiveResult {
  Eigen::VectorXd tau_grid_s;
  Eigen::VectorXd total_crosstalk;  // summed over addressed ions and spectators
  double grid_minimum_tau_s = 0.0;
  double grid_minimum_value = 0.0;
  double refined_tau_s = 0.0;
  double refined_value = 0.0;
};

// Total spectator error per pulse versus pulse duration: for every addressed
// ion, the off-resonant excitation of each spectator on all three channels at
// the configured Rabi frequencies.  The grid minimum is refined by golden
// section within its bracketing neighbors.
ObjectiveResult crosstalk_objective(const TransitionSet& transitions, const RabiMap& rabi,
                                    const Eigen::VectorXd& tau_grid_s);

struct ScalingLaw {
  double omega_exponent = 0.0;
  double gradient_exponent = 0.0;
  double secular_exponent = 0.0;
};

// Error-source scalings with (Omega, b, nu1).
inline constexpr ScalingLaw kNonResonantScaling{2.0, -2.0, 4.0 / 3.0};
inline constexpr ScalingLaw kLightShiftScaling{2.0, -2.0, 4.0 / 3.0};
inline constexpr ScalingLaw kJCouplingScaling{-2.0, 4.0, -4.0};

double scale_error(double base_value, const ScalingLaw& law, double omega_ratio,
                   double gradient_ratio, double secular_ratio);

}  // namespace iontrap

#endif  // IONTRAP_OPTIMIZE_HPP
