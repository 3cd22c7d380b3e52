#include "awb/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "awb/kernels.hpp"

namespace awb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline std::uint64_t join64(std::uint32_t hi, std::uint32_t lo) {
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

// Box-Muller pair from one 128-bit keystream block. u1 in (0,1], u2 in [0,1).
inline void block_to_normals(const std::uint32_t w[4], double out[2]) {
    const double u1 =
        static_cast<double>((join64(w[0], w[1]) >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(join64(w[2], w[3]) >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = kTwoPi * u2;
    out[0] = r * std::cos(theta);
    out[1] = r * std::sin(theta);
}

void check_grid(const BridgeParams& params, const TimeGrid& grid) {
    params.validate();
    if (!(grid.back() < params.horizon_T))
        throw domain_error("sampler: grid must end strictly before horizon_T");
}

// Scale a unit-sigma path in place; exact sigma-equivariance by construction.
void apply_sigma(std::vector<double>& values, double sigma) {
    if (sigma == 1.0)
        return;
    for (double& v : values)
        v *= sigma;
}

} // namespace

double GaussianStream::normal(std::uint64_t i) const {
    std::uint32_t w[4];
    kernels::philox_fill(seed_.root_seed, seed_.replicate_index, i >> 1, 1, w);
    double z[2];
    block_to_normals(w, z);
    return z[i & 1];
}

void GaussianStream::fill(std::uint64_t first, double* out, std::size_t count) const {
    if (count == 0)
        return;
    const std::uint64_t b0 = first >> 1;
    const std::uint64_t b1 = (first + count - 1) >> 1;

    constexpr std::size_t kChunk = 1024; // blocks per batch
    std::uint32_t words[4 * kChunk];
    std::size_t written = 0;
    for (std::uint64_t blk = b0; blk <= b1; blk += kChunk) {
        const std::size_t n = static_cast<std::size_t>(
            std::min<std::uint64_t>(kChunk, b1 - blk + 1));
        kernels::philox_fill(seed_.root_seed, seed_.replicate_index, blk, n, words);
        for (std::size_t j = 0; j < n; ++j) {
            double z[2];
            block_to_normals(words + 4 * j, z);
            const std::uint64_t idx0 = 2 * (blk + j);
            for (int h = 0; h < 2; ++h) {
                const std::uint64_t idx = idx0 + static_cast<std::uint64_t>(h);
                if (idx >= first && written < count)
                    out[written++] = z[h];
            }
        }
    }
}

ExactStepTable exact_step_table(const BridgeParams& params, const TimeGrid& grid) {
    check_grid(params, grid);
    const double T = params.horizon_T;
    const BridgeParams unit{params.alpha, 1.0, T};
    const std::size_t n = grid.size();
    ExactStepTable table;
    table.decay.resize(n > 0 ? n - 1 : 0);
    table.sdev.resize(table.decay.size());
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double s = grid[k];
        const double t = grid[k + 1];
        table.decay[k] = std::pow((T - t) / (T - s), params.alpha);
        table.sdev[k] = std::sqrt(transition_moments(unit, s, t, 0.0).variance);
    }
    return table;
}

SamplePath sample_exact(const BridgeParams& params, const TimeGrid& grid,
                        const ExactStepTable& table, const SeedSpec& seed) {
    check_grid(params, grid);
    const std::size_t n = grid.size();
    if (table.decay.size() != n - 1)
        throw argument_error("sample_exact: step table does not match grid");
    std::vector<double> z(n - 1);
    GaussianStream stream(seed);
    stream.fill(0, z.data(), z.size());

    std::vector<double> x(n);
    x[0] = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k)
        x[k + 1] = table.decay[k] * x[k] + table.sdev[k] * z[k];
    apply_sigma(x, params.sigma);
    return SamplePath{grid, std::move(x), params};
}

SamplePath sample_exact(const BridgeParams& params, const TimeGrid& grid, const SeedSpec& seed) {
    return sample_exact(params, grid, exact_step_table(params, grid), seed);
}

SamplePath sample_joint(const BridgeParams& params, const TimeGrid& grid, const SeedSpec& seed) {
    check_grid(params, grid);
    if (grid.size() > 4096)
        throw argument_error("sample_joint: grid length capped at 4096");
    const std::size_t n = grid.size();
    const std::size_t m = n - 1; // x(0) = 0 is deterministic
    std::vector<double> x(n, 0.0);
    if (m > 0) {
        const double T = params.horizon_T;
        std::vector<double> cov(m * m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const double c = covariance(params.alpha, params.alpha, grid[i + 1],
                                            grid[j + 1], T);
                cov[i * m + j] = c;
                cov[j * m + i] = c;
            }

        // In-place lower Cholesky; one diagonal jitter retry.
        auto factor = [&](std::vector<double>& a) -> bool {
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j <= i; ++j) {
                    const double s = kernels::dot(&a[i * m], &a[j * m], j);
                    if (i == j) {
                        const double d = a[i * m + i] - s;
                        if (!(d > 0.0))
                            return false;
                        a[i * m + i] = std::sqrt(d);
                    } else {
                        a[i * m + j] = (a[i * m + j] - s) / a[j * m + j];
                    }
                }
                for (std::size_t j = i + 1; j < m; ++j)
                    a[i * m + j] = 0.0;
            }
            return true;
        };

        std::vector<double> chol = cov;
        if (!factor(chol)) {
            double trace = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                trace += cov[i * m + i];
            const double jitter = 1e-12 * (trace / static_cast<double>(m));
            chol = cov;
            for (std::size_t i = 0; i < m; ++i)
                chol[i * m + i] += jitter;
            if (!factor(chol))
                throw numerical_error("sample_joint: covariance factorization failed after jitter");
        }

        std::vector<double> z(m);
        GaussianStream stream(seed);
        stream.fill(0, z.data(), z.size());
        for (std::size_t i = 0; i < m; ++i)
            x[i + 1] = kernels::dot(&chol[i * m], z.data(), i + 1);
    }
    apply_sigma(x, params.sigma);
    return SamplePath{grid, std::move(x), params};
}

SamplePath sample_euler(const BridgeParams& params, const TimeGrid& grid, const SeedSpec& seed) {
    check_grid(params, grid);
    const double T = params.horizon_T;
    const double alpha = params.alpha;
    const std::size_t n = grid.size();
    std::vector<double> z(n > 0 ? n - 1 : 0);
    GaussianStream stream(seed);
    stream.fill(0, z.data(), z.size());

    std::vector<double> x(n);
    x[0] = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double dt = grid[k + 1] - grid[k];
        const double rem = T - grid[k];
        if (!(alpha * dt / rem < 1.0))
            throw numerical_error("sample_euler: stability guard alpha*dt/(T-t) < 1 violated at step " +
                                  std::to_string(k));
        const double drift = alpha * x[k] / rem * dt;
        x[k + 1] = x[k] - drift + std::sqrt(dt) * z[k];
    }
    apply_sigma(x, params.sigma);
    return SamplePath{grid, std::move(x), params};
}

double euler_variance(const BridgeParams& params, const TimeGrid& grid) {
    check_grid(params, grid);
    const double T = params.horizon_T;
    const double s2 = params.sigma * params.sigma;
    double v = 0.0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double dt = grid[k + 1] - grid[k];
        const double f = 1.0 - params.alpha * dt / (T - grid[k]);
        v = f * f * v + s2 * dt;
    }
    return v;
}

} // namespace awb
