#include "awb/stats.hpp"

#include <algorithm>
#include <cmath>

#include "awb/errors.hpp"

namespace awb::stats {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double median(std::vector<double> v) {
    if (v.empty())
        throw argument_error("median: empty input");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1)
        return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double percentile(std::vector<double> v, double p) {
    if (v.empty())
        throw argument_error("percentile: empty input");
    if (!(p >= 0.0) || !(p <= 1.0))
        throw argument_error("percentile: need p in [0,1]");
    std::sort(v.begin(), v.end());
    const double rank = p * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    if (lo + 1 >= v.size())
        return v.back();
    const double frac = rank - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

double ks_distance_to_normal(std::vector<double> sample, double variance) {
    if (sample.empty())
        throw argument_error("ks_distance_to_normal: empty sample");
    if (!(variance > 0.0))
        throw argument_error("ks_distance_to_normal: need variance > 0");
    std::sort(sample.begin(), sample.end());
    const double sd = std::sqrt(variance);
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = normal_cdf(sample[i] / sd);
        const double hi = (static_cast<double>(i) + 1.0) / n - f;
        const double lo = f - static_cast<double>(i) / n;
        d = std::fmax(d, std::fmax(hi, lo));
    }
    return d;
}

} // namespace awb::stats
