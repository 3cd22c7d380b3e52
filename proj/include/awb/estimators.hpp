#pragma once

#include <vector>

#include <json.hpp>

#include "awb/model.hpp"

namespace awb {

// Inference outputs over one observed path up to horizon_t.
struct EstimateReport {
    double alpha_hat = 0.0;
    double sigma2_hat = 0.0;
    double energy = 0.0;         // integral of x(s)^2/(T-s)^2 over [0, horizon_t]
    double stoch_integral = 0.0; // integral of x/(T-s) dx, closed form
    double horizon_t = 0.0;
    int n_points = 0;
};

// Index of the last grid point <= t + 1e-9 (the observation horizon snaps
// down to the grid). Throws domain_error if t is negative or beyond the grid.
std::size_t horizon_index(const SamplePath& path, double t);

// Trapezoidal approximation of the energy integral of x(s)^2/(T-s)^2 on the
// grid restricted to [0, t]. Nonnegative, nondecreasing in t.
double energy_integral(const SamplePath& path, double t);

// Ito-identity evaluation of the stochastic integral of x/(T-s) dx:
//   1/2 ( x(t)^2/(T-t) - energy - ln(T/(T-t)) ).
// Only the energy term carries discretization error.
double stoch_integral_closed_form(const SamplePath& path, double t);

// MLE of the drift exponent, -(stochastic integral)/energy. Throws
// degenerate_error when the energy is (numerically) zero.
double mle_alpha(const SamplePath& path, double t);

// Log Radon-Nikodym derivative against the driftless law:
//   -alpha * (stoch integral) - alpha^2/2 * energy.
// Quadratic in alpha with argmax at mle_alpha.
double log_likelihood_ratio(const SamplePath& path, double alpha, double t);

// Realized-variance estimate of sigma^2: sum of squared increments over the
// observed partition divided by the observation span.
double qv_sigma2(const SamplePath& path);

// Hellinger process value of order 1/2 between the alpha- and beta-laws:
//   (alpha-beta)^2/8 * energy.
double hellinger_half(const SamplePath& path, double alpha, double beta, double t);

// Candidate nearest to mle_alpha(path, t); ties break toward the smaller one.
double classify_alpha(const SamplePath& path, double t, const std::vector<double>& candidates);

// All of the above in one pass, evaluated at the snapped horizon.
EstimateReport estimate_report(const SamplePath& path, double t);

// Flat JSON object with exactly these keys, in order:
// alpha_hat, sigma2_hat, energy, stoch_integral, horizon_t, n_points.
nlohmann::ordered_json to_json(const EstimateReport& report);

} // namespace awb
