#include "awb/path_stats.hpp"

#include <cmath>

namespace awb {

namespace {

void check_window(const WindowSpec& w) {
    if (!(w.t_lo >= 0.0) || !(w.t_lo < w.t_hi))
        throw domain_error("WindowSpec: need 0 <= t_lo < t_hi");
}

} // namespace

double terminal_sup(const SamplePath& path, const WindowSpec& window) {
    validate_observed(path);
    check_window(window);
    const auto& t = path.grid.points();
    double sup = 0.0;
    bool seen = false;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < window.t_lo || t[k] > window.t_hi)
            continue;
        seen = true;
        sup = std::fmax(sup, std::fabs(path.values[k]));
    }
    if (!seen)
        throw domain_error("terminal_sup: window contains no grid points");
    return sup;
}

EnvelopeRatio envelope_ratio(const SamplePath& path, double alpha, const WindowSpec& window) {
    validate_observed(path);
    check_window(window);
    const double T = path.params.horizon_T;
    const auto& t = path.grid.points();
    EnvelopeRatio out;
    bool seen = false;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < window.t_lo || t[k] > window.t_hi)
            continue;
        const double ratio = path.values[k] / lil_envelope(alpha, t[k], T);
        if (!seen) {
            out.sup_ratio = out.inf_ratio = ratio;
            seen = true;
        } else {
            out.sup_ratio = std::fmax(out.sup_ratio, ratio);
            out.inf_ratio = std::fmin(out.inf_ratio, ratio);
        }
    }
    if (!seen)
        throw domain_error("envelope_ratio: window contains no grid points");
    return out;
}

double rescaled_terminal(const SamplePath& path, double alpha) {
    validate_observed(path);
    const double T = path.params.horizon_T;
    const double t_last = path.grid.back();
    return path.values.back() / std::pow(T - t_last, alpha);
}

SignSplit sign_split(const std::vector<double>& values, double threshold) {
    if (values.empty())
        throw argument_error("sign_split: empty input");
    if (!(threshold > 0.0))
        throw argument_error("sign_split: need threshold > 0");
    std::size_t plus = 0, minus = 0;
    for (double v : values) {
        if (v > threshold)
            ++plus;
        else if (v < -threshold)
            ++minus;
    }
    const double n = static_cast<double>(values.size());
    SignSplit s;
    s.frac_plus = static_cast<double>(plus) / n;
    s.frac_minus = static_cast<double>(minus) / n;
    s.frac_small = static_cast<double>(values.size() - plus - minus) / n;
    return s;
}

} // namespace awb
