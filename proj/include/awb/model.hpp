#pragma once

#include <vector>

#include "awb/errors.hpp"

namespace awb {

// Model triple (alpha, sigma, T) of the time-inhomogeneous bridge SDE
//   dX_t = -alpha/(T-t) X_t dt + sigma dB_t,  X_0 = 0,  t in [0, T).
// alpha = 1 is the classical Brownian bridge, alpha = 0 the Wiener process.
struct BridgeParams {
    double alpha = 1.0;
    double sigma = 1.0;
    double horizon_T = 1.0;

    // Throws domain_error unless sigma > 0, horizon_T > 0 and all fields finite.
    void validate() const;
};

// Strictly increasing observation times starting at 0. The terminal time T is
// not part of the grid; use sites check points.back() < T.
class TimeGrid {
  public:
    explicit TimeGrid(std::vector<double> points);

    const std::vector<double>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    double front() const { return points_.front(); }
    double back() const { return points_.back(); }

  private:
    std::vector<double> points_;
};

// t_k = t_end * k / steps, k = 0..steps.
TimeGrid uniform_grid(double t_end, int steps);

// t_k = T * (1 - ratio^k), k = 0..steps, ratio in (0,1); points accumulate at
// the horizon, which the near-T limit theorems need resolved.
TimeGrid geometric_grid(double horizon_T, double ratio, int steps);

// One discretized realization: values[i] is the state at grid[i].
struct SamplePath {
    TimeGrid grid;
    std::vector<double> values;
    BridgeParams params; // provenance of the draw (horizon_T is load-bearing)
};

// Validates the SamplePath invariants (matching lengths, values[0] = 0, all
// values finite, grid inside [0, horizon_T)). Throws domain_error.
void validate_path(const SamplePath& path);

// Structural validity only (lengths, finiteness, grid before the horizon).
// Estimators accept any observed trajectory, not just realizations started
// at 0, so they use this relaxed check.
void validate_observed(const SamplePath& path);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

namespace detail {
// Integral of (T-u)^-gamma over [a, b], 0 <= a <= b < T. Evaluated through
// expm1 so the gamma = 1 branch point is crossed without cancellation; the
// logarithmic branch takes over for |1-gamma| < 1e-10.
double power_integral(double gamma, double a, double b, double T);
} // namespace detail

// Cov(X_s^(alpha), X_t^(beta)) for unit sigma:
//   (T-s)^alpha (T-t)^beta * integral of (T-u)^-(alpha+beta) over [0, s^t].
double covariance(double alpha, double beta, double s, double t, double T);

// E (X_t^(alpha))^2 for unit sigma; equals covariance(alpha, alpha, t, t, T).
double variance(double alpha, double t, double T);

// Quadratic variation <M^(alpha)>_t of the rescaled martingale
// M_t = X_t / (T-t)^alpha, i.e. the integral of (T-s)^-2alpha over [0, t].
// Finite limit T^(1-2alpha)/(1-2alpha) as t -> T iff alpha < 1/2.
double rescaled_qv(double alpha, double t, double T);

// Conditional law of X_t given X_s = x_s (sigma-scaled):
//   mean = ((T-t)/(T-s))^alpha x_s
//   var  = sigma^2 (T-t)^2alpha (<M>_t - <M>_s)
Moments transition_moments(const BridgeParams& params, double s, double t, double x_s);

// Iterated-logarithm envelope near the horizon, defined for alpha >= 1/2:
//   alpha > 1/2 : sqrt(2(T-t)/(2alpha-1) * ln ln(1/(T-t)))
//   alpha = 1/2 : sqrt(2(T-t) * ln(1/(T-t)) * ln ln ln(1/(T-t)))
// Throws domain_error if alpha < 1/2 or any iterated logarithm is
// nonpositive at (t, T); no clamping.
double lil_envelope(double alpha, double t, double T);

// Variance T^(1-2alpha)/(1-2alpha) of the terminal value of the rescaled
// martingale, defined for alpha < 1/2 only.
double limit_variance(double alpha, double T);

} // namespace awb
