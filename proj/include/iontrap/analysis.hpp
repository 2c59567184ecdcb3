#ifndef IONTRAP_ANALYSIS_HPP
#define IONTRAP_ANALYSIS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "iontrap/benchmark.hpp"

namespace iontrap {

struct CountPoint {
  int n = 0;
  int trials = 0;
  int bright = 0;
};

struct FidelityPoint {
  int n = 0;
  double fidelity = 0.0;
  double stderr_ = 0.0;
  int trials = 0;
};

struct FidelityCurve {
  std::vector<FidelityPoint> points;  // strictly increasing in n
  int ion_index = 0;
  int addressed_index = 0;
  InputState input_state = InputState::kEigenstate;
};

// Eigenstate runs: F = 1 - bright fraction.  Superposition runs (after the
// Ramsey wrapper): F = bright fraction.  The standard error is binomial with
// a Wilson floor at the 0/trials and trials/trials boundaries.
FidelityCurve fidelity_from_counts(const std::vector<CountPoint>& counts, InputState input,
                                   int ion_index = 0, int addressed_index = 0);

// Fidelity curves for every ion of a benchmark result, using exact per-trial
// moments when the run accumulated probabilities instead of sampled bits.
std::vector<FidelityCurve> curves_from_benchmark(const BenchmarkResult& result, InputState input,
                                                 int addressed_index);

// Bloch-sphere diffusion prediction 0.5 * (1 + exp(-2 c n)).
inline double predict_fidelity(double crosstalk, double pulse_count) {
  if (crosstalk < 0.0) throw std::invalid_argument("predict_fidelity: crosstalk must be >= 0");
  return 0.5 * (1.0 + std::exp(-2.0 * crosstalk * pulse_count));
}

struct FitResult {
  double p0 = 1.0;
  double crosstalk = 0.0;
  double p0_sigma = 0.0;
  double crosstalk_sigma = 0.0;
  double covariance_p0_c = 0.0;
  double reduced_chi2 = 0.0;
  int iterations = 0;
};

struct FitError : std::runtime_error {
  int iterations = 0;
  double cost = 0.0;
  FitError(const std::string& what, int iters, double cost_value)
      : std::runtime_error(what), iterations(iters), cost(cost_value) {}
};

// Weighted least squares of 0.5*(1+(2 p0 - 1) exp(-2 C N)); damped
// Gauss-Newton on (p0, log C) keeps C positive, the covariance is evaluated
// in (p0, C).  Flat data comes back as C = 0 with its 1 sigma upper bound in
// crosstalk_sigma.
FitResult fit_decay(const FidelityCurve& curve);

struct CrosstalkMatrix {
  Eigen::MatrixXd value;  // NaN on the diagonal and for failed fits
  Eigen::MatrixXd sigma;
};

// Row i holds the spectator fits of the run that addressed ion i.
CrosstalkMatrix crosstalk_matrix(const std::vector<std::vector<FidelityCurve>>& curves_by_addressed);

// Probability density of the polar fidelity coordinate on [0, 2 pi) after
// diffusion time dt = D t, initial condition a delta at pi.  Cosine series
// with exponent -dt m^2; wrapped Gaussian below dt = 0.05 where the series
// converges slowly.
double diffusion_density(double angle_rad, double dt);

struct WalkEstimate {
  double fidelity = 1.0;
  double stderr_ = 0.0;
  int walkers = 0;
};

// Direct random walk on the Bloch sphere: steps of angle 2 sqrt(c) about
// uniformly random axes in the x-y plane.
WalkEstimate random_walk_oracle(double c_per_step, int steps, int walkers, std::uint64_t seed);

}  // namespace iontrap

#endif  // IONTRAP_ANALYSIS_HPP
