#pragma once

#include <utility>
#include <vector>

#include "awb/model.hpp"

namespace awb {

// Observation window strictly inside [0, T).
struct WindowSpec {
    double t_lo = 0.0;
    double t_hi = 0.0;
};

// max |x(t)| over grid points inside [t_lo, t_hi]. Throws domain_error if the
// window misses the grid entirely.
double terminal_sup(const SamplePath& path, const WindowSpec& window);

struct EnvelopeRatio {
    double sup_ratio = 0.0;
    double inf_ratio = 0.0;
};

// max and min over window grid points of x(t)/lil_envelope(alpha, t, T);
// finite-sample proxy for the limsup/liminf being +-1.
EnvelopeRatio envelope_ratio(const SamplePath& path, double alpha, const WindowSpec& window);

// x(t_last)/(T - t_last)^alpha, the finite-horizon stand-in for the terminal
// value of the rescaled martingale (Gaussian limit for alpha < 1/2).
double rescaled_terminal(const SamplePath& path, double alpha);

struct SignSplit {
    double frac_plus = 0.0;
    double frac_minus = 0.0;
    double frac_small = 0.0;
};

// Fractions of values above threshold, below -threshold, and in between.
SignSplit sign_split(const std::vector<double>& values, double threshold);

} // namespace awb
