#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "awb/kernels.hpp"

using namespace awb::kernels;

namespace {

struct KnownAnswer {
    std::uint64_t key, stream, block;
    std::uint32_t out[4];
};

// Reference keystream blocks for the 10-round generator (counter laid out as
// (lo/hi block, lo/hi stream), key as (lo/hi key)).
const KnownAnswer kKat[] = {
    {0, 0, 0, {0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}},
    {0xffffffffffffffffull, 0xffffffffffffffffull, 0xffffffffffffffffull,
     {0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}},
    {0x299f31d0a4093822ull, 0x0370734413198a2eull, 0x85a308d3243f6a88ull,
     {0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}},
};

} // namespace

TEST_CASE("philox keystream matches the known answers") {
    for (const auto& kat : kKat) {
        std::uint32_t out[4];
        scalar::philox_fill(kat.key, kat.stream, kat.block, 1, out);
        for (int i = 0; i < 4; ++i)
            CHECK(out[i] == kat.out[i]);
    }
}

TEST_CASE("philox avx2 variant is bit-identical to scalar") {
    if (detect_backend() != Backend::avx2) {
        MESSAGE("avx2 not available; skipping");
        return;
    }
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const std::uint64_t key = rng();
        const std::uint64_t stream = rng();
        const std::uint64_t block0 = rng();
        for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{3}, std::size_t{4},
                              std::size_t{5}, std::size_t{17}, std::size_t{256}}) {
            std::vector<std::uint32_t> a(4 * n + 1, 0xabadcafe), b(4 * n + 1, 0xabadcafe);
            scalar::philox_fill(key, stream, block0, n, a.data());
#if AWB_HAVE_AVX2_BACKEND
            avx2::philox_fill(key, stream, block0, n, b.data());
#endif
            CHECK(a == b);
        }
    }
}

TEST_CASE("reduction kernels agree across backends") {
    if (detect_backend() != Backend::avx2) {
        MESSAGE("avx2 not available; skipping");
        return;
    }
#if AWB_HAVE_AVX2_BACKEND
    std::mt19937_64 rng(512);
    std::normal_distribution<double> normal;
    for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{2}, std::size_t{3},
                          std::size_t{4}, std::size_t{5}, std::size_t{7}, std::size_t{8},
                          std::size_t{1000}, std::size_t{65537}}) {
        std::vector<double> x(n), w(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = normal(rng);
            y[i] = normal(rng);
            w[i] = std::fabs(normal(rng));
        }
        const double tol = 1e-12 * (static_cast<double>(n) + 1.0);

        const double d0 = scalar::dot(x.data(), y.data(), n);
        const double d1 = avx2::dot(x.data(), y.data(), n);
        CHECK(std::fabs(d0 - d1) <= tol * 10.0);

        const double w0 = scalar::weighted_sq_sum(w.data(), x.data(), n);
        const double w1 = avx2::weighted_sq_sum(w.data(), x.data(), n);
        CHECK(std::fabs(w0 - w1) <= tol * std::fmax(w0, 1.0));

        const double s0 = scalar::sq_diff_sum(x.data(), n);
        const double s1 = avx2::sq_diff_sum(x.data(), n);
        CHECK(std::fabs(s0 - s1) <= tol * std::fmax(s0, 1.0));
    }
#endif
}

TEST_CASE("kernel dispatch selects and reports backends") {
    const Backend detected = detect_backend();
    CHECK(active_backend() == detected);

    set_backend(Backend::scalar);
    CHECK(active_backend() == Backend::scalar);
    double a = 2.0, b = 3.0;
    CHECK(dot(&a, &b, 1) == 6.0);

    if (detected == Backend::avx2) {
        set_backend(Backend::avx2);
        CHECK(active_backend() == Backend::avx2);
        CHECK(dot(&a, &b, 1) == 6.0);
    }
    set_backend(detected);
    CHECK(std::string(backend_name(Backend::scalar)) == "scalar");
    CHECK(std::string(backend_name(Backend::avx2)) == "avx2");
}

TEST_CASE("scalar reductions compute the obvious sums") {
    const double x[] = {1.0, 2.0, 4.0, 8.0};
    const double w[] = {1.0, 0.5, 0.25, 0.125};
    CHECK(scalar::dot(x, w, 4) == doctest::Approx(4.0));
    CHECK(scalar::weighted_sq_sum(w, x, 4) == doctest::Approx(1 + 2 + 4 + 8));
    CHECK(scalar::sq_diff_sum(x, 4) == doctest::Approx(1 + 4 + 16));
    CHECK(scalar::sq_diff_sum(x, 1) == 0.0);
    CHECK(scalar::sq_diff_sum(x, 0) == 0.0);
}
