#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "awb/estimators.hpp"
#include "awb/kernels.hpp"
#include "awb/model.hpp"
#include "awb/sampling.hpp"

using namespace awb;

namespace {

TimeGrid single_point_grid() {
    return TimeGrid({0.0});
}

bool same_values(const SamplePath& a, const SamplePath& b) {
    if (a.values.size() != b.values.size())
        return false;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        if (a.values[i] != b.values[i])
            return false;
    return true;
}

} // namespace

TEST_CASE("single-point grid yields the zero path for every method") {
    const BridgeParams p{1.5, 2.0, 1.0};
    const TimeGrid g = single_point_grid();
    const SeedSpec seed{42, 0};
    for (const SamplePath& path :
         {sample_exact(p, g, seed), sample_joint(p, g, seed), sample_euler(p, g, seed)}) {
        CHECK(path.values.size() == 1);
        CHECK(path.values[0] == 0.0);
    }
}

TEST_CASE("determinism: identical seeds give bit-identical paths") {
    const BridgeParams p{0.8, 1.3, 1.0};
    const TimeGrid g = geometric_grid(1.0, 0.9, 64);
    const SeedSpec seed{123456789, 17};
    CHECK(same_values(sample_exact(p, g, seed), sample_exact(p, g, seed)));
    CHECK(same_values(sample_joint(p, g, seed), sample_joint(p, g, seed)));
    CHECK(same_values(sample_euler(p, g, seed), sample_euler(p, g, seed)));

    // distinct replicate indices give different draws
    CHECK(!same_values(sample_exact(p, g, seed), sample_exact(p, g, SeedSpec{123456789, 18})));
}

TEST_CASE("stream batch fill equals per-index evaluation") {
    const GaussianStream stream(SeedSpec{777, 3});
    std::vector<double> batch(101);
    stream.fill(5, batch.data(), batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i)
        CHECK(batch[i] == stream.normal(5 + i));
}

TEST_CASE("sigma scaling is exact, entry for entry") {
    const TimeGrid g = uniform_grid(0.9, 50);
    const SeedSpec seed{2024, 5};
    for (double alpha : {-0.5, 0.0, 1.0}) {
        const SamplePath unit = sample_exact(BridgeParams{alpha, 1.0, 1.0}, g, seed);
        const SamplePath scaled = sample_exact(BridgeParams{alpha, 2.5, 1.0}, g, seed);
        for (std::size_t i = 0; i < unit.values.size(); ++i)
            CHECK(scaled.values[i] == 2.5 * unit.values[i]);

        const SamplePath junit = sample_joint(BridgeParams{alpha, 1.0, 1.0}, g, seed);
        const SamplePath jscaled = sample_joint(BridgeParams{alpha, 2.5, 1.0}, g, seed);
        for (std::size_t i = 0; i < junit.values.size(); ++i)
            CHECK(jscaled.values[i] == 2.5 * junit.values[i]);

        const SamplePath eunit = sample_euler(BridgeParams{alpha, 1.0, 1.0}, g, seed);
        const SamplePath escaled = sample_euler(BridgeParams{alpha, 2.5, 1.0}, g, seed);
        for (std::size_t i = 0; i < eunit.values.size(); ++i)
            CHECK(escaled.values[i] == 2.5 * eunit.values[i]);
    }
}

TEST_CASE("euler with zero drift reproduces the exact Wiener path") {
    const TimeGrid g = uniform_grid(0.8, 128);
    const SeedSpec seed{9001, 0};
    const BridgeParams p{0.0, 1.7, 1.0};
    const SamplePath euler = sample_euler(p, g, seed);
    const SamplePath exact = sample_exact(p, g, seed);
    for (std::size_t i = 0; i < euler.values.size(); ++i)
        CHECK(euler.values[i] == exact.values[i]);
}

TEST_CASE("euler stability guard reports the offending step") {
    // alpha*dt/(T-t) >= 1 on the last step of a coarse grid close to T
    const BridgeParams p{50.0, 1.0, 1.0};
    const TimeGrid g = uniform_grid(0.99, 10);
    CHECK_THROWS_AS(sample_euler(p, g, SeedSpec{1, 0}), numerical_error);
    try {
        sample_euler(p, g, SeedSpec{1, 0});
    } catch (const numerical_error& e) {
        CHECK(std::string(e.what()).find("step") != std::string::npos);
    }
}

TEST_CASE("euler variance recursion tracks the closed-form variance") {
    const BridgeParams p{1.0, 1.0, 1.0};
    const double target = variance(1.0, 0.5, 1.0); // = 0.25
    const double v1 = euler_variance(p, uniform_grid(0.5, 5000));   // step 1e-4
    const double v2 = euler_variance(p, uniform_grid(0.5, 10000));  // step 5e-5
    const double e1 = std::fabs(v1 - target) / target;
    const double e2 = std::fabs(v2 - target) / target;
    CHECK(e1 < 0.005);
    const double ratio = e1 / e2;
    CHECK(ratio > 1.7);
    CHECK(ratio < 2.3);
}

TEST_CASE("grid validation against the horizon") {
    const BridgeParams p{1.0, 1.0, 0.5};
    CHECK_THROWS_AS(sample_exact(p, uniform_grid(0.5, 10), SeedSpec{}), domain_error);
    CHECK_THROWS_AS(sample_exact(p, uniform_grid(0.9, 10), SeedSpec{}), domain_error);
    CHECK_NOTHROW(sample_exact(p, uniform_grid(0.49, 10), SeedSpec{}));
}

TEST_CASE("paths are bit-identical across kernel backends") {
    // the keystream is integer-exact and the recursion has no reductions, so
    // the selected backend must not change a sampled path at all; the
    // quadrature reductions may differ only in summation rounding
    if (kernels::detect_backend() != kernels::Backend::avx2) {
        MESSAGE("avx2 not available; skipping");
        return;
    }
    const kernels::Backend saved = kernels::active_backend();
    const BridgeParams p{1.0, 1.0, 1.0};
    const TimeGrid g = geometric_grid(1.0, 0.98, 200);
    const SeedSpec seed{192837, 4};

    kernels::set_backend(kernels::Backend::scalar);
    const SamplePath a = sample_exact(p, g, seed);
    const double ea = energy_integral(a, g.back());
    const double qa = qv_sigma2(a);

    kernels::set_backend(kernels::Backend::avx2);
    const SamplePath b = sample_exact(p, g, seed);
    const double eb = energy_integral(b, g.back());
    const double qb = qv_sigma2(b);

    kernels::set_backend(saved);

    CHECK(same_values(a, b));
    CHECK(std::fabs(ea - eb) <= 1e-12 * ea);
    CHECK(std::fabs(qa - qb) <= 1e-12 * qa);
}

TEST_CASE("joint sampler survives a numerically singular covariance") {
    // two observation times one ulp apart make the covariance matrix singular
    // to machine precision; the one-shot diagonal jitter either rescues the
    // factorization or the sampler reports a numerical error -- never NaNs.
    const double t0 = 0.5;
    const double t1 = std::nextafter(t0, 1.0);
    const TimeGrid g({0.0, t0, t1});
    try {
        const SamplePath path = sample_joint(BridgeParams{1.0, 1.0, 1.0}, g, SeedSpec{3, 3});
        for (double v : path.values)
            CHECK(std::isfinite(v));
    } catch (const numerical_error&) {
        // acceptable outcome per the factorization contract
    }
}

TEST_CASE("joint sampler grid cap") {
    std::vector<double> pts(4097);
    for (std::size_t i = 0; i < pts.size(); ++i)
        pts[i] = static_cast<double>(i) * 1e-5;
    const TimeGrid g(std::move(pts));
    CHECK_THROWS_AS(sample_joint(BridgeParams{1.0, 1.0, 1.0}, g, SeedSpec{}), argument_error);
}

TEST_CASE("exact sampler marginal variance matches the closed form (MC)") {
    // Monte Carlo oracle: sample variance at t = 0.5 within 4 SE.
    const BridgeParams p{1.0, 1.0, 1.0};
    const TimeGrid g = uniform_grid(0.5, 500); // step 1e-3
    const ExactStepTable table = exact_step_table(p, g);
    const int R = 40000;
    double sum = 0.0, sumsq = 0.0;
    for (int r = 0; r < R; ++r) {
        const SamplePath path = sample_exact(p, g, table, SeedSpec{31337, static_cast<std::uint64_t>(r)});
        const double x = path.values.back();
        sum += x;
        sumsq += x * x;
    }
    const double target = variance(1.0, 0.5, 1.0); // = 0.25
    const double emp = sumsq / R;
    const double se_var = target * std::sqrt(2.0 / R);
    CHECK(std::fabs(emp - target) <= 4.0 * se_var);
    const double se_mean = std::sqrt(target / R);
    CHECK(std::fabs(sum / R) <= 4.0 * se_mean);
}

TEST_CASE("exact and joint samplers agree with the closed-form covariance (MC)") {
    auto check_method = [](bool joint, double alpha, const std::vector<double>& times) {
        const BridgeParams p{alpha, 1.0, 1.0};
        std::vector<double> pts = times;
        const TimeGrid g(std::move(pts));
        const std::size_t m = g.size() - 1;
        const int R = 40000;
        const ExactStepTable table = exact_step_table(p, g);
        std::vector<double> moments(m * m, 0.0);
        std::vector<double> means(m, 0.0);
        for (int r = 0; r < R; ++r) {
            const SeedSpec seed{777000 + (joint ? 1u : 0u), static_cast<std::uint64_t>(r)};
            const SamplePath path =
                joint ? sample_joint(p, g, seed) : sample_exact(p, g, table, seed);
            for (std::size_t i = 0; i < m; ++i) {
                means[i] += path.values[i + 1];
                for (std::size_t j = i; j < m; ++j)
                    moments[i * m + j] += path.values[i + 1] * path.values[j + 1];
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            const double se_mean = std::sqrt(variance(alpha, g[i + 1], 1.0) / R);
            CHECK(std::fabs(means[i] / R) <= 4.0 * se_mean);
        }
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j) {
                const double cii = variance(alpha, g[i + 1], 1.0);
                const double cjj = variance(alpha, g[j + 1], 1.0);
                const double cij = covariance(alpha, alpha, g[i + 1], g[j + 1], 1.0);
                const double emp = moments[i * m + j] / R;
                const double se = std::sqrt((cii * cjj + cij * cij) / R);
                CHECK(std::fabs(emp - cij) <= 4.0 * se);
            }
    };
    check_method(false, 0.0, {0.0, 0.25, 0.5, 0.75}); // Wiener: cov = min(s,t)
    check_method(true, 0.0, {0.0, 0.25, 0.5, 0.75});
    check_method(false, 2.0, {0.0, 0.3, 0.6});
    check_method(true, 2.0, {0.0, 0.3, 0.6});
    // 10-point grid, both methods against the same closed form
    const std::vector<double> ten{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    check_method(false, -0.5, ten);
    check_method(true, -0.5, ten);
}
