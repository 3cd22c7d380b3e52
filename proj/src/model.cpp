#include "awb/model.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace awb {

void BridgeParams::validate() const {
    if (!std::isfinite(alpha))
        throw domain_error("BridgeParams: alpha must be finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw domain_error("BridgeParams: sigma must be > 0");
    if (!(horizon_T > 0.0) || !std::isfinite(horizon_T))
        throw domain_error("BridgeParams: horizon_T must be > 0");
}

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty())
        throw argument_error("TimeGrid: empty");
    if (points_.front() != 0.0)
        throw argument_error("TimeGrid: first point must be 0");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i]))
            throw argument_error("TimeGrid: point " + std::to_string(i) + " not finite");
        if (i > 0 && !(points_[i] > points_[i - 1]))
            throw argument_error("TimeGrid: points must be strictly increasing (index " +
                                 std::to_string(i) + ")");
    }
}

TimeGrid uniform_grid(double t_end, int steps) {
    if (!(t_end > 0.0) || steps < 1)
        throw argument_error("uniform_grid: need t_end > 0 and steps >= 1");
    std::vector<double> pts(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k)
        pts[static_cast<std::size_t>(k)] = t_end * static_cast<double>(k) / static_cast<double>(steps);
    return TimeGrid(std::move(pts));
}

TimeGrid geometric_grid(double horizon_T, double ratio, int steps) {
    if (!(horizon_T > 0.0))
        throw argument_error("geometric_grid: need horizon_T > 0");
    if (!(ratio > 0.0) || !(ratio < 1.0))
        throw argument_error("geometric_grid: need ratio in (0,1)");
    if (steps < 1)
        throw argument_error("geometric_grid: need steps >= 1");
    std::vector<double> pts(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k)
        pts[static_cast<std::size_t>(k)] = horizon_T * (1.0 - std::pow(ratio, static_cast<double>(k)));
    return TimeGrid(std::move(pts));
}

void validate_observed(const SamplePath& path) {
    path.params.validate();
    if (path.values.size() != path.grid.size())
        throw domain_error("SamplePath: values/grid length mismatch");
    for (double v : path.values)
        if (!std::isfinite(v))
            throw domain_error("SamplePath: non-finite value");
    if (!(path.grid.back() < path.params.horizon_T))
        throw domain_error("SamplePath: grid must end before horizon_T");
}

void validate_path(const SamplePath& path) {
    validate_observed(path);
    if (path.values.front() != 0.0)
        throw domain_error("SamplePath: values[0] must be 0");
}

namespace detail {

double power_integral(double gamma, double a, double b, double T) {
    if (gamma == 0.0)
        return b - a;
    const double q = 1.0 - gamma;
    const double r = (T - b) / (T - a); // in (0, 1]
    if (std::fabs(q) < 1e-10)
        return -std::log(r);
    // ((T-a)^q - (T-b)^q)/q = -(T-a)^q expm1(q ln r)/q
    return -std::pow(T - a, q) * std::expm1(q * std::log(r)) / q;
}

} // namespace detail

static void check_obs_time(double t, double T, const char* who) {
    if (!(T > 0.0))
        throw domain_error(std::string(who) + ": need T > 0");
    if (!(t >= 0.0) || !(t < T))
        throw domain_error(std::string(who) + ": need 0 <= t < T");
}

double covariance(double alpha, double beta, double s, double t, double T) {
    check_obs_time(s, T, "covariance");
    check_obs_time(t, T, "covariance");
    const double m = std::fmin(s, t);
    if (m == 0.0)
        return 0.0; // X_0 = 0
    return std::pow(T - s, alpha) * std::pow(T - t, beta) *
           detail::power_integral(alpha + beta, 0.0, m, T);
}

double variance(double alpha, double t, double T) {
    check_obs_time(t, T, "variance");
    if (t == 0.0)
        return 0.0;
    const double gamma = 2.0 * alpha;
    if (gamma == 0.0)
        return t;
    const double q = 1.0 - gamma;
    const double r = (T - t) / T;
    if (std::fabs(q) < 1e-10)
        return (T - t) * std::log(T / (T - t));
    // (T-t)^2a * T^q * (1 - r^q)/q, fused so neither factor over/underflows.
    return -T * std::pow(r, gamma) * std::expm1(q * std::log(r)) / q;
}

double rescaled_qv(double alpha, double t, double T) {
    check_obs_time(t, T, "rescaled_qv");
    return detail::power_integral(2.0 * alpha, 0.0, t, T);
}

Moments transition_moments(const BridgeParams& params, double s, double t, double x_s) {
    params.validate();
    const double T = params.horizon_T;
    if (!(s >= 0.0) || s > t)
        throw domain_error("transition_moments: need 0 <= s <= t");
    if (!(t < T))
        throw domain_error("transition_moments: need t < T");
    const double alpha = params.alpha;
    const double r = (T - t) / (T - s);
    Moments m;
    m.mean = std::pow(r, alpha) * x_s;
    if (s == t) {
        m.variance = 0.0;
        return m;
    }
    const double s2 = params.sigma * params.sigma;
    const double gamma = 2.0 * alpha;
    if (gamma == 0.0) {
        m.variance = s2 * (t - s);
        return m;
    }
    const double q = 1.0 - gamma;
    if (std::fabs(q) < 1e-10) {
        m.variance = s2 * (T - t) * std::log(1.0 / r);
        return m;
    }
    // sigma^2 (T-t)^2a ((T-s)^q - (T-t)^q)/q = sigma^2 (T-s) r^2a (1 - r^q)/q
    m.variance = -s2 * (T - s) * std::pow(r, gamma) * std::expm1(q * std::log(r)) / q;
    return m;
}

double lil_envelope(double alpha, double t, double T) {
    check_obs_time(t, T, "lil_envelope");
    if (alpha < 0.5)
        throw domain_error("lil_envelope: defined for alpha >= 1/2 only");
    const double u = T - t;
    const double l1 = std::log(1.0 / u);
    if (!(l1 > 0.0))
        throw domain_error("lil_envelope: ln(1/(T-t)) not positive");
    if (alpha == 0.5) {
        const double l2 = std::log(l1);
        if (!(l2 > 0.0))
            throw domain_error("lil_envelope: ln ln(1/(T-t)) not positive");
        const double l3 = std::log(l2);
        if (!(l3 > 0.0))
            throw domain_error("lil_envelope: ln ln ln(1/(T-t)) not positive");
        return std::sqrt(2.0 * u * l1 * l3);
    }
    const double l2 = std::log(l1);
    if (!(l2 > 0.0))
        throw domain_error("lil_envelope: ln ln(1/(T-t)) not positive");
    return std::sqrt(2.0 * u / (2.0 * alpha - 1.0) * l2);
}

double limit_variance(double alpha, double T) {
    if (!(T > 0.0))
        throw domain_error("limit_variance: need T > 0");
    if (!(alpha < 0.5))
        throw domain_error("limit_variance: defined for alpha < 1/2 only");
    return std::pow(T, 1.0 - 2.0 * alpha) / (1.0 - 2.0 * alpha);
}

} // namespace awb
