#include "iontrap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iontrap {

namespace {

double binomial_stderr(int bright, int trials) {
  const double p = static_cast<double>(bright) / trials;
  if (bright == 0 || bright == trials) {
    // Wilson-style floor keeps the weight finite at the boundary.
    const double p_tilde = (bright + 0.5) / (trials + 1.0);
    return std::sqrt(p_tilde * (1.0 - p_tilde) / trials);
  }
  return std::sqrt(p * (1.0 - p) / trials);
}

double decay_model(double p0, double c, double n) {
  return 0.5 * (1.0 + (2.0 * p0 - 1.0) * std::exp(-2.0 * c * n));
}

}  // namespace

FidelityCurve fidelity_from_counts(const std::vector<CountPoint>& counts, InputState input,
                                   int ion_index, int addressed_index) {
  FidelityCurve curve;
  curve.ion_index = ion_index;
  curve.addressed_index = addressed_index;
  curve.input_state = input;
  curve.points.reserve(counts.size());
  for (const CountPoint& c : counts) {
    if (c.trials <= 0) throw std::invalid_argument("fidelity_from_counts: trials must be > 0");
    if (c.bright < 0 || c.bright > c.trials)
      throw std::invalid_argument("fidelity_from_counts: bright count out of range");
    const double fraction = static_cast<double>(c.bright) / c.trials;
    FidelityPoint p;
    p.n = c.n;
    p.trials = c.trials;
    p.fidelity = input == InputState::kEigenstate ? 1.0 - fraction : fraction;
    p.stderr_ = binomial_stderr(c.bright, c.trials);
    curve.points.push_back(p);
  }
  std::sort(curve.points.begin(), curve.points.end(),
            [](const FidelityPoint& a, const FidelityPoint& b) { return a.n < b.n; });
  return curve;
}

std::vector<FidelityCurve> curves_from_benchmark(const BenchmarkResult& result, InputState input,
                                                 int addressed_index) {
  const int n_ions = static_cast<int>(result.bright_sum.cols());
  std::vector<FidelityCurve> curves;
  curves.reserve(n_ions);
  for (int ion = 0; ion < n_ions; ++ion) {
    if (result.sampled) {
      std::vector<CountPoint> counts;
      counts.reserve(result.n_values.size());
      for (std::size_t li = 0; li < result.n_values.size(); ++li)
        counts.push_back({result.n_values[li], result.trials,
                          static_cast<int>(std::lround(result.bright_sum(li, ion)))});
      curves.push_back(fidelity_from_counts(counts, input, ion, addressed_index));
    } else {
      FidelityCurve curve;
      curve.ion_index = ion;
      curve.addressed_index = addressed_index;
      curve.input_state = input;
      for (std::size_t li = 0; li < result.n_values.size(); ++li) {
        const double mean = result.bright_sum(li, ion) / result.trials;
        const double var =
            std::max(0.0, result.bright_sumsq(li, ion) / result.trials - mean * mean);
        FidelityPoint p;
        p.n = result.n_values[li];
        p.trials = result.trials;
        p.fidelity = input == InputState::kEigenstate ? 1.0 - mean : mean;
        p.stderr_ = std::sqrt(var / result.trials);
        curve.points.push_back(p);
      }
      curves.push_back(std::move(curve));
    }
  }
  return curves;
}

FitResult fit_decay(const FidelityCurve& curve) {
  std::vector<double> ns, ys, sigmas;
  double sigma_max = 0.0;
  for (const FidelityPoint& p : curve.points) sigma_max = std::max(sigma_max, p.stderr_);
  // Zero-variance points (a deterministic length-0 sequence, noiseless input)
  // keep a large but finite weight: at most 1e6 times the best-measured point.
  const double sigma_floor = std::max(1e-12, 1e-3 * sigma_max);
  for (const FidelityPoint& p : curve.points) {
    ns.push_back(p.n);
    ys.push_back(p.fidelity);
    sigmas.push_back(std::max(p.stderr_, sigma_floor));
  }
  const int m = static_cast<int>(ns.size());
  {
    std::vector<double> distinct = ns;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3)
      throw std::invalid_argument("fit_decay: need at least 3 distinct sequence lengths");
  }

  // Starting values: p0 from the shortest sequence, C from the first visibly
  // decayed point.
  const auto min_it = std::min_element(ns.begin(), ns.end());
  double p0 = std::clamp(ys[min_it - ns.begin()], 0.51, 1.0);
  double c = 0.0;
  const double a0 = 2.0 * p0 - 1.0;
  for (int k = 0; k < m; ++k) {
    const double a = 2.0 * ys[k] - 1.0;
    if (ns[k] > *min_it && a > 0.05 * a0 && a < 0.95 * a0) {
      c = std::log(a0 / a) / (2.0 * (ns[k] - *min_it));
      break;
    }
  }
  const double n_max = *std::max_element(ns.begin(), ns.end());
  if (!(c > 0.0)) c = 0.1 / std::max(n_max, 1.0);
  double u = std::log(c);

  auto cost_at = [&](double p0v, double uv) {
    const double cv = std::exp(uv);
    double cost = 0.0;
    for (int k = 0; k < m; ++k) {
      const double r = (decay_model(p0v, cv, ns[k]) - ys[k]) / sigmas[k];
      cost += r * r;
    }
    return cost;
  };

  constexpr int kMaxIters = 200;
  constexpr double kMinLogC = -60.0;  // hard clamp of the log-C coordinate
  double lambda = 1e-3;
  double cost = cost_at(p0, u);
  int iter = 0;
  bool converged = false;
  for (; iter < kMaxIters; ++iter) {
    const double cv = std::exp(u);
    Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
    Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
    for (int k = 0; k < m; ++k) {
      const double e = std::exp(-2.0 * cv * ns[k]);
      const double r = (decay_model(p0, cv, ns[k]) - ys[k]) / sigmas[k];
      const double d_p0 = e / sigmas[k];
      const double d_u = cv * (-(2.0 * p0 - 1.0) * ns[k] * e) / sigmas[k];
      jtj(0, 0) += d_p0 * d_p0;
      jtj(0, 1) += d_p0 * d_u;
      jtj(1, 1) += d_u * d_u;
      jtr[0] += d_p0 * r;
      jtr[1] += d_u * r;
    }
    jtj(1, 0) = jtj(0, 1);

    // Tiny absolute floor on the u direction: at the flat boundary its JtJ
    // entry collapses with C^2 and the damped system would go indefinite
    // through cancellation.
    Eigen::Matrix2d damped = jtj;
    damped(0, 0) = jtj(0, 0) * (1.0 + lambda);
    damped(1, 1) = jtj(1, 1) * (1.0 + lambda) + 1e-12;
    const Eigen::Vector2d step = damped.ldlt().solve(-jtr);

    const double p0_new = std::clamp(p0 + step[0], 0.0, 1.0);
    const double u_new = std::max(u + step[1], kMinLogC);
    const double cost_new = cost_at(p0_new, u_new);
    if (cost_new <= cost) {
      const bool p0_settled = std::abs(p0_new - p0) < 1e-12;
      // The boundary C -> 0 is a flat direction of the log parameterization;
      // once the decay over the whole measured range is unresolvable the u
      // coordinate has converged for every practical purpose.
      const bool u_settled =
          std::abs(u_new - u) < 1e-10 || std::exp(u_new) * n_max < 1e-7;
      const bool stalled = cost - cost_new < 1e-13 * (1.0 + cost_new);
      p0 = p0_new;
      u = u_new;
      cost = cost_new;
      lambda = std::max(lambda * 0.3, 1e-12);
      if ((p0_settled && u_settled) || stalled) {
        converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) {
        converged = true;  // stuck at a (possibly flat) minimum
        break;
      }
    }
  }
  if (!converged) throw FitError("fit_decay: Gauss-Newton did not converge", iter, cost);

  // A total decay below 1e-7 across the measured range is flat.
  const bool flat = std::exp(u) * n_max < 1e-7;
  const double c_hat = flat ? 0.0 : std::exp(u);

  // Covariance in (p0, C); well defined also in the flat limit.
  Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
  double chi2 = 0.0;
  for (int k = 0; k < m; ++k) {
    const double e = std::exp(-2.0 * c_hat * ns[k]);
    const double d_p0 = e / sigmas[k];
    const double d_c = -(2.0 * p0 - 1.0) * ns[k] * e / sigmas[k];
    jtj(0, 0) += d_p0 * d_p0;
    jtj(0, 1) += d_p0 * d_c;
    jtj(1, 1) += d_c * d_c;
    const double r = (decay_model(p0, c_hat, ns[k]) - ys[k]) / sigmas[k];
    chi2 += r * r;
  }
  jtj(1, 0) = jtj(0, 1);
  const Eigen::Matrix2d cov = jtj.inverse();

  FitResult result;
  result.p0 = p0;
  result.crosstalk = c_hat;
  result.p0_sigma = std::sqrt(std::max(cov(0, 0), 0.0));
  result.crosstalk_sigma = std::sqrt(std::max(cov(1, 1), 0.0));
  result.covariance_p0_c = cov(0, 1);
  result.reduced_chi2 = m > 2 ? chi2 / (m - 2) : 0.0;
  result.iterations = iter;
  return result;
}

CrosstalkMatrix crosstalk_matrix(
    const std::vector<std::vector<FidelityCurve>>& curves_by_addressed) {
  const int n = static_cast<int>(curves_by_addressed.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CrosstalkMatrix matrix;
  matrix.value = Eigen::MatrixXd::Constant(n, n, nan);
  matrix.sigma = Eigen::MatrixXd::Constant(n, n, nan);
  for (int i = 0; i < n; ++i) {
    for (const FidelityCurve& curve : curves_by_addressed[i]) {
      const int j = curve.ion_index;
      if (j == i) continue;
      try {
        const FitResult fit = fit_decay(curve);
        matrix.value(i, j) = fit.crosstalk;
        matrix.sigma(i, j) = fit.crosstalk_sigma;
      } catch (const std::exception&) {
        // left as NaN; the caller decides how to report failed entries
      }
    }
  }
  return matrix;
}

double diffusion_density(double angle_rad, double dt) {
  if (dt < 0.0) throw std::invalid_argument("diffusion_density: dt must be >= 0");
  // Offset coordinate: the initial condition is a delta at pi.
  double y = std::remainder(angle_rad - M_PI, 2.0 * M_PI);
  if (dt == 0.0)
    return y == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;

  if (dt < 0.05) {
    // Wrapped heat kernel, variance 2 dt.
    double density = 0.0;
    for (int k = -6; k <= 6; ++k) {
      const double d = y - 2.0 * M_PI * k;
      density += std::exp(-d * d / (4.0 * dt));
    }
    return density / std::sqrt(4.0 * M_PI * dt);
  }

  double density = 1.0 / (2.0 * M_PI);
  constexpr int kMaxTerms = 10000;
  for (int m = 1; m <= kMaxTerms; ++m) {
    const double envelope = std::exp(-dt * m * m) / M_PI;
    if (envelope < 1e-12 * std::abs(density)) break;
    density += envelope * std::cos(m * y);
  }
  return density;
}

WalkEstimate random_walk_oracle(double c_per_step, int steps, int walkers, std::uint64_t seed) {
  if (c_per_step < 0.0)
    throw std::invalid_argument("random_walk_oracle: c_per_step must be >= 0");
  if (walkers <= 0) throw std::invalid_argument("random_walk_oracle: walkers must be > 0");
  WalkEstimate estimate;
  estimate.walkers = walkers;
  if (c_per_step == 0.0 || steps == 0) return estimate;  // F = 1 exactly

  const double delta = 2.0 * std::sqrt(c_per_step);
  const double cos_d = std::cos(delta);
  const double sin_d = std::sin(delta);
  double sum = 0.0, sumsq = 0.0;
  for (int w = 0; w < walkers; ++w) {
    Rng rng = derive_stream(seed, w, StreamPurpose::kWalkerAxes);
    Eigen::Vector3d v(0.0, 0.0, 1.0);
    for (int s = 0; s < steps; ++s) {
      const double alpha = 2.0 * M_PI * rng.next_double();
      const Eigen::Vector3d axis(std::cos(alpha), std::sin(alpha), 0.0);
      v = v * cos_d + axis.cross(v) * sin_d + axis * (axis.dot(v) * (1.0 - cos_d));
      if ((s & 0xFF) == 0xFF) v.normalize();
    }
    const double f = 0.5 * (1.0 + v.z());
    sum += f;
    sumsq += f * f;
  }
  estimate.fidelity = sum / walkers;
  const double var = std::max(0.0, sumsq / walkers - estimate.fidelity * estimate.fidelity);
  estimate.stderr_ = std::sqrt(var / walkers);
  return estimate;
}

}  // namespace iontrap
