#pragma once

#include <cstdint>
#include <vector>

#include "awb/model.hpp"

namespace awb {

// (root_seed, replicate_index) fully determines the random stream; distinct
// replicate indices address disjoint counter ranges, hence independent streams.
struct SeedSpec {
    std::uint64_t root_seed = 0;
    std::uint64_t replicate_index = 0;
};

// Deterministic counter-addressable N(0,1) stream: variate i is a pure
// function of (root_seed, replicate_index, i), so batch generation, ordering
// and thread layout cannot change the draws.
class GaussianStream {
  public:
    explicit GaussianStream(SeedSpec seed) : seed_(seed) {}

    double normal(std::uint64_t i) const;

    // out[j] = normal(first + j); identical values to the per-index call.
    void fill(std::uint64_t first, double* out, std::size_t count) const;

    SeedSpec seed() const { return seed_; }

  private:
    SeedSpec seed_;
};

// Per-step coefficients of the exact Markov recursion at sigma = 1:
//   x_{k+1} = decay[k] * x_k + sdev[k] * z_k.
// Grid-dependent only, so one table serves any number of replicates.
struct ExactStepTable {
    std::vector<double> decay;
    std::vector<double> sdev;
};

ExactStepTable exact_step_table(const BridgeParams& params, const TimeGrid& grid);

// Exact sequential sampler: each increment follows the conditional Gaussian
// law, so marginals are exact in distribution arbitrarily close to the
// horizon. Reference method.
SamplePath sample_exact(const BridgeParams& params, const TimeGrid& grid, const SeedSpec& seed);
SamplePath sample_exact(const BridgeParams& params, const TimeGrid& grid,
                        const ExactStepTable& table, const SeedSpec& seed);

// One joint Gaussian draw from the Cholesky factor of the covariance matrix.
// Grid length capped at 4096 (factorization cost). If factorization fails,
// 1e-12 * (trace/n) is added to the diagonal once before giving up.
SamplePath sample_joint(const BridgeParams& params, const TimeGrid& grid, const SeedSpec& seed);

// Explicit Euler-Maruyama discretization
//   x_{k+1} = x_k - alpha x_k / (T - t_k) dt_k + sigma sqrt(dt_k) z_k.
// Throws numerical_error (naming the step) unless alpha*dt_k/(T-t_k) < 1.
SamplePath sample_euler(const BridgeParams& params, const TimeGrid& grid, const SeedSpec& seed);

// Deterministic second-moment recursion of the Euler scheme,
//   v_{k+1} = (1 - alpha dt_k/(T-t_k))^2 v_k + sigma^2 dt_k;
// its gap to variance(alpha, t_end, T) is the scheme's weak error, O(step).
double euler_variance(const BridgeParams& params, const TimeGrid& grid);

} // namespace awb
