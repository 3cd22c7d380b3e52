#include "awb/kernels.hpp"

namespace awb::kernels::scalar {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t c[4], const std::uint32_t k[2]) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t n0 = hi1 ^ c[1] ^ k[0];
    const std::uint32_t n2 = hi0 ^ c[3] ^ k[1];
    c[0] = n0;
    c[1] = lo1;
    c[2] = n2;
    c[3] = lo0;
}

} // namespace

void philox_fill(std::uint64_t key, std::uint64_t stream, std::uint64_t block0,
                 std::size_t nblocks, std::uint32_t* out) {
    for (std::size_t i = 0; i < nblocks; ++i) {
        const std::uint64_t blk = block0 + i;
        std::uint32_t c[4] = {
            static_cast<std::uint32_t>(blk),
            static_cast<std::uint32_t>(blk >> 32),
            static_cast<std::uint32_t>(stream),
            static_cast<std::uint32_t>(stream >> 32),
        };
        std::uint32_t k[2] = {
            static_cast<std::uint32_t>(key),
            static_cast<std::uint32_t>(key >> 32),
        };
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                k[0] += kWeyl0;
                k[1] += kWeyl1;
            }
            philox_round(c, k);
        }
        out[4 * i + 0] = c[0];
        out[4 * i + 1] = c[1];
        out[4 * i + 2] = c[2];
        out[4 * i + 3] = c[3];
    }
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += a[i] * b[i];
    return acc;
}

double weighted_sq_sum(const double* w, const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += w[i] * (x[i] * x[i]);
    return acc;
}

double sq_diff_sum(const double* x, std::size_t n) {
    if (n < 2)
        return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = x[i + 1] - x[i];
        acc += d * d;
    }
    return acc;
}

} // namespace awb::kernels::scalar
