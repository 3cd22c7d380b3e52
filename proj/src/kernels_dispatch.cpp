#include "awb/kernels.hpp"

#include "awb/errors.hpp"

namespace awb::kernels {

namespace {

struct Vtable {
    void (*philox_fill)(std::uint64_t, std::uint64_t, std::uint64_t, std::size_t, std::uint32_t*);
    double (*dot)(const double*, const double*, std::size_t);
    double (*weighted_sq_sum)(const double*, const double*, std::size_t);
    double (*sq_diff_sum)(const double*, std::size_t);
};

constexpr Vtable kScalar{scalar::philox_fill, scalar::dot, scalar::weighted_sq_sum,
                         scalar::sq_diff_sum};

#if AWB_HAVE_AVX2_BACKEND
constexpr Vtable kAvx2{avx2::philox_fill, avx2::dot, avx2::weighted_sq_sum, avx2::sq_diff_sum};
#endif

bool avx2_supported() {
#if AWB_HAVE_AVX2_BACKEND
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const Vtable* vtable_for(Backend b) {
#if AWB_HAVE_AVX2_BACKEND
    if (b == Backend::avx2)
        return &kAvx2;
#endif
    (void)b;
    return &kScalar;
}

Backend g_backend = detect_backend();
const Vtable* g_vtable = vtable_for(g_backend);

} // namespace

Backend detect_backend() {
    return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

Backend active_backend() {
    return g_backend;
}

void set_backend(Backend b) {
    switch (b) {
    case Backend::scalar:
        g_backend = b;
        g_vtable = &kScalar;
        return;
    case Backend::avx2:
#if AWB_HAVE_AVX2_BACKEND
        if (avx2_supported()) {
            g_backend = b;
            g_vtable = &kAvx2;
            return;
        }
#endif
        throw argument_error("kernels: avx2 backend not supported on this CPU");
    }
    throw argument_error("kernels: unknown backend");
}

const char* backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

void philox_fill(std::uint64_t key, std::uint64_t stream, std::uint64_t block0,
                 std::size_t nblocks, std::uint32_t* out) {
    g_vtable->philox_fill(key, stream, block0, nblocks, out);
}

double dot(const double* a, const double* b, std::size_t n) {
    return g_vtable->dot(a, b, n);
}

double weighted_sq_sum(const double* w, const double* x, std::size_t n) {
    return g_vtable->weighted_sq_sum(w, x, n);
}

double sq_diff_sum(const double* x, std::size_t n) {
    return g_vtable->sq_diff_sum(x, n);
}

} // namespace awb::kernels
