#pragma once

#include <cstddef>
#include <string>

// Inner-loop kernels behind the pair scans (Lipschitz audits, McShane
// extension, distance rows, variation quotients).
//
// Two implementations exist: a scalar reference (kernels_scalar.cpp) and an
// AVX2 variant (kernels_avx2.cpp) selected at runtime via cpuid. Both are
// compiled without FMA contraction and vectorize over the candidate index j,
// never across it, so every lane performs the same rounding sequence as the
// scalar loop and results are bit-identical between backends. Reductions are
// min/max only; sums stay in caller code in a fixed order.

namespace lipgeo::kernels {

struct Backend {
    const char* name;

    // min_j (vals[j] + dist[j]); n >= 1.  (McShane extension step.)
    double (*min_plus)(const double* vals, const double* dist, std::size_t n);

    // max_j (|fi - f[j]| - cap[j]); n >= 1.  Positive result = Lipschitz
    // violation against the per-pair bound cap[j].
    double (*max_lip_violation)(double fi, const double* f, const double* cap,
                                std::size_t n);

    // max_j |fi - f[j]| / d[j] over indices with lo < d[j] <= hi; 0 if no
    // index qualifies.  (Pointwise variation / biglip scans.)
    double (*max_quotient)(double fi, const double* f, const double* d,
                           double lo, double hi, std::size_t n);

    // out[j] = Euclidean distance from point i to point j, coords row-major
    // n x dim.  Lane-local accumulation over dim in fixed order.
    void (*euclidean_row)(const double* coords, std::size_t n, std::size_t dim,
                          std::size_t i, double* out);

    // out[j] = max-norm distance from point i to point j.
    void (*maxnorm_row)(const double* coords, std::size_t n, std::size_t dim,
                        std::size_t i, double* out);

    // out[j] = |(hi_i - hi[j]) + (lo_i - lo[j])| for split 1-D coordinates
    // (anchor + tiny offset; keeps sub-ulp separations exact).
    void (*split1d_row)(const double* hi, const double* lo, std::size_t n,
                        std::size_t i, double* out);
};

const Backend& scalar_backend();
#if defined(LIPGEO_HAVE_AVX2_TU)
const Backend& avx2_backend();
#endif

// Active backend: picked once at startup (AVX2 when the CPU supports it),
// overridable with LIPGEO_KERNEL=scalar|avx2 or set_backend().
const Backend& active();
void set_backend(const std::string& name);

// Worker count for the pair-scan reductions (default 1). Only max-reductions
// run in parallel, so results are independent of the worker count.
void set_workers(unsigned n);
unsigned workers();

// max over chunk results of chunk_max(begin, end) applied to a partition of
// [0, n); runs on the configured worker count.
double parallel_chunk_max(std::size_t n,
                          double (*chunk_max)(std::size_t, std::size_t, void*),
                          void* ctx);

inline double min_plus(const double* v, const double* d, std::size_t n) {
    return active().min_plus(v, d, n);
}
inline double max_lip_violation(double fi, const double* f, const double* cap,
                                std::size_t n) {
    return active().max_lip_violation(fi, f, cap, n);
}
inline double max_quotient(double fi, const double* f, const double* d,
                           double lo, double hi, std::size_t n) {
    return active().max_quotient(fi, f, d, lo, hi, n);
}

}  // namespace lipgeo::kernels
