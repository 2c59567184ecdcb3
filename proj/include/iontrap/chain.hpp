#ifndef IONTRAP_CHAIN_HPP
#define IONTRAP_CHAIN_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "iontrap/constants.hpp"

namespace iontrap {

struct TrapConfig {
  int ion_count = 1;
  double secular_frequency_hz = 124e3;  // axial center-of-mass mode
  double ion_mass_kg = kYb171IonMassKg;

  void validate() const {
    if (ion_count < 1) throw std::invalid_argument("TrapConfig: ion_count must be >= 1");
    if (!(secular_frequency_hz > 0.0))
      throw std::invalid_argument("TrapConfig: secular_frequency_hz must be > 0");
    if (!(ion_mass_kg > 0.0)) throw std::invalid_argument("TrapConfig: ion_mass_kg must be > 0");
  }
};

struct FieldConfig {
  double gradient_t_per_m = 0.0;
  double bias_t = 0.0;
  // Axial coordinate where the field equals the bias alone.
  double zero_position_m = 0.0;

  void validate() const {
    if (gradient_t_per_m < 0.0)
      throw std::invalid_argument("FieldConfig: gradient_t_per_m must be >= 0");
  }
};

struct IonChain {
  Eigen::VectorXd positions_m;  // strictly ascending, symmetric about the mean
  double length_scale_m = 0.0;  // l = (e^2/(4 pi eps0 M w^2))^(1/3), w = 2 pi nu

  int size() const { return static_cast<int>(positions_m.size()); }
};

// Per-ion transition frequencies of the 2S1/2 hyperfine manifold.
struct TransitionSet {
  Eigen::VectorXd pi_hz;           // |0> <-> |0'>, field-independent to first order
  Eigen::VectorXd sigma_plus_hz;   // |0> <-> |1>,  shifted +zeeman * B(z)
  Eigen::VectorXd sigma_minus_hz;  // |0> <-> |-1>, shifted -zeeman * B(z)

  int size() const { return static_cast<int>(pi_hz.size()); }
};

struct SolverError : std::runtime_error {
  int iterations = 0;
  double residual = 0.0;
  SolverError(const std::string& what, int iters, double resid)
      : std::runtime_error(what), iterations(iters), residual(resid) {}
};

inline double magnetic_field_at(const FieldConfig& field, double z_m) {
  return field.bias_t + field.gradient_t_per_m * (z_m - field.zero_position_m);
}

// Equilibrium positions of the ions in the harmonic axial potential with
// pairwise Coulomb repulsion.  Damped Newton on the dimensionless force
// equations, converged to max residual < 1e-12.
IonChain equilibrium_positions(const TrapConfig& trap, const PhysicalConstants& constants);

TransitionSet transition_map(const IonChain& chain, const FieldConfig& field,
                             const PhysicalConstants& constants);

}  // namespace iontrap

#endif  // IONTRAP_CHAIN_HPP
