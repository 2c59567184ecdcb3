#include "iontrap/chain.hpp"

#include <cmath>

namespace iontrap {

namespace {

// Gradient of the dimensionless potential V(u) = sum u_i^2/2 + sum_{i<j} 1/|u_i-u_j|.
Eigen::VectorXd potential_gradient(const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size());
  Eigen::VectorXd g = u;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = u[i] - u[j];
      g[i] -= (d > 0.0 ? 1.0 : -1.0) / (d * d);
    }
  }
  return g;
}

Eigen::MatrixXd potential_hessian(const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = std::abs(u[i] - u[j]);
      const double c = 2.0 / (d * d * d);
      h(i, i) += c;
      h(i, j) -= c;
    }
  }
  return h;
}

}  // namespace

IonChain equilibrium_positions(const TrapConfig& trap, const PhysicalConstants& constants) {
  trap.validate();
  constants.validate();

  const double omega = 2.0 * M_PI * trap.secular_frequency_hz;
  const double length_scale =
      std::cbrt(constants.coulomb_nm2 / (trap.ion_mass_kg * omega * omega));

  const int n = trap.ion_count;
  IonChain chain;
  chain.length_scale_m = length_scale;
  if (n == 1) {
    chain.positions_m = Eigen::VectorXd::Zero(1);
    return chain;
  }

  // Uniformly spaced seed; the spacing only needs the right order of magnitude.
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u[i] = (i - 0.5 * (n - 1)) * 1.0;

  constexpr double kTol = 1e-12;
  constexpr int kMaxIters = 200;
  double resid = potential_gradient(u).cwiseAbs().maxCoeff();
  int iter = 0;
  for (; iter < kMaxIters && resid > kTol; ++iter) {
    const Eigen::VectorXd g = potential_gradient(u);
    const Eigen::MatrixXd h = potential_hessian(u);
    Eigen::VectorXd step = h.ldlt().solve(g);

    // Damp so that no ion crosses its neighbor.
    double scale = 1.0;
    for (int i = 0; i + 1 < n; ++i) {
      const double gap = u[i + 1] - u[i];
      const double shrink = step[i + 1] - step[i];  // positive shrink narrows the gap
      if (-shrink * scale < -0.9 * gap) continue;
      if (shrink * scale > 0.9 * gap) scale = 0.9 * gap / shrink;
    }
    u -= scale * step;
    resid = potential_gradient(u).cwiseAbs().maxCoeff();
  }
  if (resid > kTol)
    throw SolverError("equilibrium_positions: Newton iteration did not converge", iter, resid);

  // The potential is symmetric; remove the numerically accumulated offset.
  u.array() -= u.mean();
  chain.positions_m = u * length_scale;
  return chain;
}

TransitionSet transition_map(const IonChain& chain, const FieldConfig& field,
                             const PhysicalConstants& constants) {
  field.validate();
  constants.validate();
  const int n = chain.size();
  TransitionSet t;
  t.pi_hz = Eigen::VectorXd::Constant(n, constants.hyperfine_hz);
  t.sigma_plus_hz.resize(n);
  t.sigma_minus_hz.resize(n);
  for (int i = 0; i < n; ++i) {
    const double shift = constants.zeeman_hz_per_t * magnetic_field_at(field, chain.positions_m[i]);
    t.sigma_plus_hz[i] = constants.hyperfine_hz + shift;
    t.sigma_minus_hz[i] = constants.hyperfine_hz - shift;
  }
  return t;
}

}  // namespace iontrap
