#pragma once

#include <vector>

namespace awb::stats {

// Standard normal CDF.
double normal_cdf(double x);

// Median (average of middle two for even counts). Input copied.
double median(std::vector<double> v);

// Linear-interpolation percentile at rank p*(n-1), p in [0,1].
double percentile(std::vector<double> v, double p);

// Two-sided Kolmogorov-Smirnov distance between the sample and a centered
// normal with the given variance.
double ks_distance_to_normal(std::vector<double> sample, double variance);

} // namespace awb::stats
