#include "awb/estimators.hpp"

#include <cmath>
#include <vector>

#include "awb/kernels.hpp"

namespace awb {

namespace {

constexpr double kHorizonTol = 1e-9;
constexpr double kZeroEnergy = 1e-300;

// Trapezoid weights c_k for sum c_k x_k^2 approximating the energy integral
// on grid points 0..last: c_k = (half-cell widths) / (T - t_k)^2.
std::vector<double> energy_weights(const SamplePath& path, std::size_t last) {
    const double T = path.params.horizon_T;
    const auto& t = path.grid.points();
    std::vector<double> w(last + 1, 0.0);
    for (std::size_t k = 0; k < last; ++k) {
        const double half = 0.5 * (t[k + 1] - t[k]);
        w[k] += half;
        w[k + 1] += half;
    }
    for (std::size_t k = 0; k <= last; ++k) {
        const double rem = T - t[k];
        w[k] /= rem * rem;
    }
    return w;
}

} // namespace

std::size_t horizon_index(const SamplePath& path, double t) {
    if (!(t >= 0.0))
        throw domain_error("horizon_index: need t >= 0");
    const auto& pts = path.grid.points();
    if (t > pts.back() + kHorizonTol)
        throw domain_error("horizon_index: t beyond observed range");
    std::size_t k = pts.size() - 1;
    while (k > 0 && pts[k] > t + kHorizonTol)
        --k;
    return k;
}

double energy_integral(const SamplePath& path, double t) {
    validate_observed(path);
    const std::size_t last = horizon_index(path, t);
    if (last == 0)
        return 0.0;
    const auto w = energy_weights(path, last);
    return kernels::weighted_sq_sum(w.data(), path.values.data(), last + 1);
}

double stoch_integral_closed_form(const SamplePath& path, double t) {
    validate_observed(path);
    const double T = path.params.horizon_T;
    if (!(t < T))
        throw domain_error("stoch_integral_closed_form: need t < T");
    const std::size_t last = horizon_index(path, t);
    const double tn = path.grid[last];
    const double xn = path.values[last];
    const double energy = energy_integral(path, tn);
    return 0.5 * (xn * xn / (T - tn) - energy - std::log(T / (T - tn)));
}

double mle_alpha(const SamplePath& path, double t) {
    const std::size_t last = horizon_index(path, t);
    const double tn = path.grid[last];
    const double energy = energy_integral(path, tn);
    if (energy < kZeroEnergy)
        throw degenerate_error("mle_alpha: zero energy, estimator undefined");
    return -stoch_integral_closed_form(path, tn) / energy;
}

double log_likelihood_ratio(const SamplePath& path, double alpha, double t) {
    const std::size_t last = horizon_index(path, t);
    const double tn = path.grid[last];
    const double energy = energy_integral(path, tn);
    const double integral = stoch_integral_closed_form(path, tn);
    return -alpha * integral - 0.5 * alpha * alpha * energy;
}

double qv_sigma2(const SamplePath& path) {
    validate_observed(path);
    if (path.grid.size() < 2)
        throw degenerate_error("qv_sigma2: need at least 2 points");
    const double span = path.grid.back() - path.grid.front();
    return kernels::sq_diff_sum(path.values.data(), path.values.size()) / span;
}

double hellinger_half(const SamplePath& path, double alpha, double beta, double t) {
    const double d = alpha - beta;
    return d * d / 8.0 * energy_integral(path, t);
}

double classify_alpha(const SamplePath& path, double t, const std::vector<double>& candidates) {
    if (candidates.empty())
        throw argument_error("classify_alpha: empty candidate list");
    const double a = mle_alpha(path, t);
    double best = candidates.front();
    double best_d = std::fabs(candidates.front() - a);
    for (double c : candidates) {
        const double d = std::fabs(c - a);
        if (d < best_d || (d == best_d && c < best)) {
            best = c;
            best_d = d;
        }
    }
    return best;
}

EstimateReport estimate_report(const SamplePath& path, double t) {
    validate_observed(path);
    const std::size_t last = horizon_index(path, t);
    const double tn = path.grid[last];
    EstimateReport rep;
    rep.horizon_t = tn;
    rep.n_points = static_cast<int>(last + 1);
    rep.energy = energy_integral(path, tn);
    rep.stoch_integral = stoch_integral_closed_form(path, tn);
    if (rep.energy < kZeroEnergy)
        throw degenerate_error("estimate_report: zero energy, MLE undefined");
    rep.alpha_hat = -rep.stoch_integral / rep.energy;
    if (last >= 1) {
        const double span = tn - path.grid.front();
        rep.sigma2_hat = kernels::sq_diff_sum(path.values.data(), last + 1) / span;
    }
    return rep;
}

nlohmann::ordered_json to_json(const EstimateReport& report) {
    nlohmann::ordered_json j;
    j["alpha_hat"] = report.alpha_hat;
    j["sigma2_hat"] = report.sigma2_hat;
    j["energy"] = report.energy;
    j["stoch_integral"] = report.stoch_integral;
    j["horizon_t"] = report.horizon_t;
    j["n_points"] = report.n_points;
    return j;
}

} // namespace awb
