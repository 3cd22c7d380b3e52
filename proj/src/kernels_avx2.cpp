// AVX2 kernel variants. This translation unit is compiled with -mavx2 and
// only entered after runtime CPU detection. No FMA is used so the mul/add
// rounding matches the scalar reference exactly where order is preserved.
#include "awb/kernels.hpp"

#if AWB_HAVE_AVX2_BACKEND

#include <immintrin.h>

namespace awb::kernels::avx2 {

namespace {

constexpr std::uint64_t kMul0 = 0xD2511F53ull;
constexpr std::uint64_t kMul1 = 0xCD9E8D57ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B9ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE85ull;

// Horizontal sum with a fixed combining order: (l0+l2) + (l1+l3).
inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi); // {l0+l2, l1+l3}
    return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

} // namespace

void philox_fill(std::uint64_t key, std::uint64_t stream, std::uint64_t block0,
                 std::size_t nblocks, std::uint32_t* out) {
    const __m256i mask32 = _mm256_set1_epi64x(0xffffffffll);
    const __m256i m0 = _mm256_set1_epi64x(static_cast<long long>(kMul0));
    const __m256i m1 = _mm256_set1_epi64x(static_cast<long long>(kMul1));
    const __m256i w0 = _mm256_set1_epi64x(static_cast<long long>(kWeyl0));
    const __m256i w1 = _mm256_set1_epi64x(static_cast<long long>(kWeyl1));
    const __m256i c2init = _mm256_set1_epi64x(static_cast<long long>(stream & 0xffffffffull));
    const __m256i c3init = _mm256_set1_epi64x(static_cast<long long>(stream >> 32));

    std::size_t i = 0;
    for (; i + 4 <= nblocks; i += 4) {
        const std::uint64_t b = block0 + i;
        // Lanes hold zero-extended 32-bit words of 4 consecutive blocks.
        __m256i c0 = _mm256_set_epi64x(static_cast<long long>((b + 3) & 0xffffffffull),
                                       static_cast<long long>((b + 2) & 0xffffffffull),
                                       static_cast<long long>((b + 1) & 0xffffffffull),
                                       static_cast<long long>((b + 0) & 0xffffffffull));
        __m256i c1 = _mm256_set_epi64x(static_cast<long long>((b + 3) >> 32),
                                       static_cast<long long>((b + 2) >> 32),
                                       static_cast<long long>((b + 1) >> 32),
                                       static_cast<long long>((b + 0) >> 32));
        __m256i c2 = c2init;
        __m256i c3 = c3init;
        __m256i k0 = _mm256_set1_epi64x(static_cast<long long>(key & 0xffffffffull));
        __m256i k1 = _mm256_set1_epi64x(static_cast<long long>(key >> 32));

        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                k0 = _mm256_and_si256(_mm256_add_epi64(k0, w0), mask32);
                k1 = _mm256_and_si256(_mm256_add_epi64(k1, w1), mask32);
            }
            // _mm256_mul_epu32 multiplies the low 32 bits of each 64-bit lane.
            const __m256i p0 = _mm256_mul_epu32(c0, m0);
            const __m256i p1 = _mm256_mul_epu32(c2, m1);
            const __m256i hi0 = _mm256_srli_epi64(p0, 32);
            const __m256i lo0 = _mm256_and_si256(p0, mask32);
            const __m256i hi1 = _mm256_srli_epi64(p1, 32);
            const __m256i lo1 = _mm256_and_si256(p1, mask32);
            const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), k0);
            const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), k1);
            c0 = n0;
            c1 = lo1;
            c2 = n2;
            c3 = lo0;
        }

        alignas(32) std::uint64_t v0[4], v1[4], v2[4], v3[4];
        _mm256_store_si256(reinterpret_cast<__m256i*>(v0), c0);
        _mm256_store_si256(reinterpret_cast<__m256i*>(v1), c1);
        _mm256_store_si256(reinterpret_cast<__m256i*>(v2), c2);
        _mm256_store_si256(reinterpret_cast<__m256i*>(v3), c3);
        for (int lane = 0; lane < 4; ++lane) {
            std::uint32_t* o = out + 4 * (i + static_cast<std::size_t>(lane));
            o[0] = static_cast<std::uint32_t>(v0[lane]);
            o[1] = static_cast<std::uint32_t>(v1[lane]);
            o[2] = static_cast<std::uint32_t>(v2[lane]);
            o[3] = static_cast<std::uint32_t>(v3[lane]);
        }
    }
    if (i < nblocks)
        scalar::philox_fill(key, stream, block0 + i, nblocks - i, out + 4 * i);
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
    }
    double s = hsum(acc);
    for (; i < n; ++i)
        s += a[i] * b[i];
    return s;
}

double weighted_sq_sum(const double* w, const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vw = _mm256_loadu_pd(w + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(vw, _mm256_mul_pd(vx, vx)));
    }
    double s = hsum(acc);
    for (; i < n; ++i)
        s += w[i] * (x[i] * x[i]);
    return s;
}

double sq_diff_sum(const double* x, std::size_t n) {
    if (n < 2)
        return 0.0;
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 5 <= n; i += 4) {
        const __m256d lo = _mm256_loadu_pd(x + i);
        const __m256d hi = _mm256_loadu_pd(x + i + 1);
        const __m256d d = _mm256_sub_pd(hi, lo);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double s = hsum(acc);
    for (; i + 1 < n; ++i) {
        const double d = x[i + 1] - x[i];
        s += d * d;
    }
    return s;
}

} // namespace awb::kernels::avx2

#endif // AWB_HAVE_AVX2_BACKEND
