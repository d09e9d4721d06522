#include "lipgeo/kernels.hpp"

#include <cmath>

// Reference kernels. The AVX2 variants mirror these loops exactly; any change
// here must be reflected there or the equivalence tests fail.

namespace lipgeo::kernels {
namespace {

double s_min_plus(const double* vals, const double* dist, std::size_t n) {
    double best = vals[0] + dist[0];
    for (std::size_t j = 1; j < n; ++j) {
        const double c = vals[j] + dist[j];
        if (c < best) best = c;
    }
    return best;
}

double s_max_lip_violation(double fi, const double* f, const double* cap,
                           std::size_t n) {
    double worst = std::fabs(fi - f[0]) - cap[0];
    for (std::size_t j = 1; j < n; ++j) {
        const double v = std::fabs(fi - f[j]) - cap[j];
        if (v > worst) worst = v;
    }
    return worst;
}

double s_max_quotient(double fi, const double* f, const double* d, double lo,
                      double hi, std::size_t n) {
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (d[j] > lo && d[j] <= hi) {
            const double q = std::fabs(fi - f[j]) / d[j];
            if (q > best) best = q;
        }
    }
    return best;
}

void s_euclidean_row(const double* coords, std::size_t n, std::size_t dim,
                     std::size_t i, double* out) {
    const double* pi = coords + i * dim;
    for (std::size_t j = 0; j < n; ++j) {
        const double* pj = coords + j * dim;
        double acc = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            const double diff = pi[k] - pj[k];
            acc += diff * diff;
        }
        out[j] = std::sqrt(acc);
    }
}

void s_maxnorm_row(const double* coords, std::size_t n, std::size_t dim,
                   std::size_t i, double* out) {
    const double* pi = coords + i * dim;
    for (std::size_t j = 0; j < n; ++j) {
        const double* pj = coords + j * dim;
        double acc = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            const double diff = std::fabs(pi[k] - pj[k]);
            if (diff > acc) acc = diff;
        }
        out[j] = acc;
    }
}

void s_split1d_row(const double* hi, const double* lo, std::size_t n,
                   std::size_t i, double* out) {
    const double hi_i = hi[i];
    const double lo_i = lo[i];
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = std::fabs((hi_i - hi[j]) + (lo_i - lo[j]));
    }
}

}  // namespace

const Backend& scalar_backend() {
    static const Backend b{
        "scalar",         s_min_plus,     s_max_lip_violation,
        s_max_quotient,   s_euclidean_row, s_maxnorm_row,
        s_split1d_row,
    };
    return b;
}

}  // namespace lipgeo::kernels
