#include "lipgeo/kernels.hpp"

#include <cmath>
#include <immintrin.h>

// AVX2 variants. Lanes run the scalar loop's rounding sequence verbatim
// (vectorized over j only, no FMA, lane-local accumulation), so outputs are
// bit-identical with kernels_scalar.cpp; the min/max reductions are exact and
// insensitive to lane order.

namespace lipgeo::kernels {
namespace {

const __m256d kAbsMask =
    _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

inline double hmin(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_min_pd(lo, hi);
    m = _mm_min_sd(m, _mm_unpackhi_pd(m, m));
    return _mm_cvtsd_f64(m);
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_max_pd(lo, hi);
    m = _mm_max_sd(m, _mm_unpackhi_pd(m, m));
    return _mm_cvtsd_f64(m);
}

double v_min_plus(const double* vals, const double* dist, std::size_t n) {
    std::size_t j = 0;
    double best = vals[0] + dist[0];
    if (n >= 4) {
        __m256d acc = _mm256_add_pd(_mm256_loadu_pd(vals), _mm256_loadu_pd(dist));
        for (j = 4; j + 4 <= n; j += 4) {
            const __m256d c =
                _mm256_add_pd(_mm256_loadu_pd(vals + j), _mm256_loadu_pd(dist + j));
            acc = _mm256_min_pd(acc, c);
        }
        best = hmin(acc);
    } else {
        j = 1;
    }
    for (; j < n; ++j) {
        const double c = vals[j] + dist[j];
        if (c < best) best = c;
    }
    return best;
}

double v_max_lip_violation(double fi, const double* f, const double* cap,
                           std::size_t n) {
    const __m256d vfi = _mm256_set1_pd(fi);
    std::size_t j = 0;
    double worst = std::fabs(fi - f[0]) - cap[0];
    if (n >= 4) {
        __m256d diff = _mm256_and_pd(kAbsMask, _mm256_sub_pd(vfi, _mm256_loadu_pd(f)));
        __m256d acc = _mm256_sub_pd(diff, _mm256_loadu_pd(cap));
        for (j = 4; j + 4 <= n; j += 4) {
            diff = _mm256_and_pd(kAbsMask,
                                 _mm256_sub_pd(vfi, _mm256_loadu_pd(f + j)));
            acc = _mm256_max_pd(acc, _mm256_sub_pd(diff, _mm256_loadu_pd(cap + j)));
        }
        worst = hmax(acc);
    } else {
        j = 1;
    }
    for (; j < n; ++j) {
        const double v = std::fabs(fi - f[j]) - cap[j];
        if (v > worst) worst = v;
    }
    return worst;
}

double v_max_quotient(double fi, const double* f, const double* d, double lo,
                      double hi, std::size_t n) {
    const __m256d vfi = _mm256_set1_pd(fi);
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vhi = _mm256_set1_pd(hi);
    const __m256d zero = _mm256_setzero_pd();
    __m256d acc = zero;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d vd = _mm256_loadu_pd(d + j);
        const __m256d mask = _mm256_and_pd(_mm256_cmp_pd(vd, vlo, _CMP_GT_OQ),
                                           _mm256_cmp_pd(vd, vhi, _CMP_LE_OQ));
        const __m256d diff =
            _mm256_and_pd(kAbsMask, _mm256_sub_pd(vfi, _mm256_loadu_pd(f + j)));
        const __m256d q = _mm256_div_pd(diff, vd);
        acc = _mm256_max_pd(acc, _mm256_blendv_pd(zero, q, mask));
    }
    double best = hmax(acc);
    for (; j < n; ++j) {
        if (d[j] > lo && d[j] <= hi) {
            const double q = std::fabs(fi - f[j]) / d[j];
            if (q > best) best = q;
        }
    }
    return best;
}

void v_euclidean_row(const double* coords, std::size_t n, std::size_t dim,
                     std::size_t i, double* out) {
    const double* pi = coords + i * dim;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t k = 0; k < dim; ++k) {
            const __m256d pj = _mm256_set_pd(
                coords[(j + 3) * dim + k], coords[(j + 2) * dim + k],
                coords[(j + 1) * dim + k], coords[j * dim + k]);
            const __m256d diff = _mm256_sub_pd(_mm256_set1_pd(pi[k]), pj);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
        }
        _mm256_storeu_pd(out + j, _mm256_sqrt_pd(acc));
    }
    for (; j < n; ++j) {
        const double* pj = coords + j * dim;
        double acc = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            const double diff = pi[k] - pj[k];
            acc += diff * diff;
        }
        out[j] = std::sqrt(acc);
    }
}

void v_maxnorm_row(const double* coords, std::size_t n, std::size_t dim,
                   std::size_t i, double* out) {
    const double* pi = coords + i * dim;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t k = 0; k < dim; ++k) {
            const __m256d pj = _mm256_set_pd(
                coords[(j + 3) * dim + k], coords[(j + 2) * dim + k],
                coords[(j + 1) * dim + k], coords[j * dim + k]);
            const __m256d diff =
                _mm256_and_pd(kAbsMask, _mm256_sub_pd(_mm256_set1_pd(pi[k]), pj));
            acc = _mm256_max_pd(acc, diff);
        }
        _mm256_storeu_pd(out + j, acc);
    }
    for (; j < n; ++j) {
        const double* pj = coords + j * dim;
        double acc = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            const double diff = std::fabs(pi[k] - pj[k]);
            if (diff > acc) acc = diff;
        }
        out[j] = acc;
    }
}

void v_split1d_row(const double* hi, const double* lo, std::size_t n,
                   std::size_t i, double* out) {
    const __m256d vhi = _mm256_set1_pd(hi[i]);
    const __m256d vlo = _mm256_set1_pd(lo[i]);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d dh = _mm256_sub_pd(vhi, _mm256_loadu_pd(hi + j));
        const __m256d dl = _mm256_sub_pd(vlo, _mm256_loadu_pd(lo + j));
        _mm256_storeu_pd(out + j, _mm256_and_pd(kAbsMask, _mm256_add_pd(dh, dl)));
    }
    for (; j < n; ++j) {
        out[j] = std::fabs((hi[i] - hi[j]) + (lo[i] - lo[j]));
    }
}

}  // namespace

const Backend& avx2_backend() {
    static const Backend b{
        "avx2",          v_min_plus,      v_max_lip_violation,
        v_max_quotient,  v_euclidean_row, v_maxnorm_row,
        v_split1d_row,
    };
    return b;
}

}  // namespace lipgeo::kernels
