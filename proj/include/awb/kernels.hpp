#pragma once

#include <cstddef>
#include <cstdint>

// Hot inner-loop kernels behind a runtime-selected backend. The scalar
// implementations are the reference; the AVX2 variants must match them
// bit-exactly for integer work (Philox) and to reduction rounding for the
// floating-point sums (equivalence-tested).
namespace awb::kernels {

enum class Backend { scalar, avx2 };

// Best backend this CPU supports.
Backend detect_backend();
Backend active_backend();
// Throws argument_error if the backend is not supported on this CPU.
// Intended for startup/tests; not synchronized against concurrent kernel calls.
void set_backend(Backend b);
const char* backend_name(Backend b);

// Philox4x32-10 keystream. Writes 4*nblocks words: block i of the (key,
// stream) sequence occupies out[4i..4i+3], with counter words
// (lo32(block0+i), hi32(block0+i), lo32(stream), hi32(stream)).
void philox_fill(std::uint64_t key, std::uint64_t stream, std::uint64_t block0,
                 std::size_t nblocks, std::uint32_t* out);

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// sum_i w[i] * x[i]^2  (trapezoid quadratures of squared paths)
double weighted_sq_sum(const double* w, const double* x, std::size_t n);

// sum over consecutive pairs of (x[i+1] - x[i])^2; n is the number of points.
double sq_diff_sum(const double* x, std::size_t n);

// Reference implementations, always available (used by equivalence tests).
namespace scalar {
void philox_fill(std::uint64_t key, std::uint64_t stream, std::uint64_t block0,
                 std::size_t nblocks, std::uint32_t* out);
double dot(const double* a, const double* b, std::size_t n);
double weighted_sq_sum(const double* w, const double* x, std::size_t n);
double sq_diff_sum(const double* x, std::size_t n);
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define AWB_HAVE_AVX2_BACKEND 1
namespace avx2 {
void philox_fill(std::uint64_t key, std::uint64_t stream, std::uint64_t block0,
                 std::size_t nblocks, std::uint32_t* out);
double dot(const double* a, const double* b, std::size_t n);
double weighted_sq_sum(const double* w, const double* x, std::size_t n);
double sq_diff_sum(const double* x, std::size_t n);
} // namespace avx2
#else
#define AWB_HAVE_AVX2_BACKEND 0
#endif

} // namespace awb::kernels
