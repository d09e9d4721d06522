#include "lipgeo/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lipgeo::kernels {
namespace {

const Backend* pick_default() {
#if defined(LIPGEO_HAVE_AVX2_TU) && defined(__x86_64__)
    if (__builtin_cpu_supports("avx2")) return &avx2_backend();
#endif
    return &scalar_backend();
}

const Backend*& current() {
    static const Backend* b = [] {
        if (const char* env = std::getenv("LIPGEO_KERNEL")) {
            const std::string s(env);
            if (s == "scalar") return &scalar_backend();
#if defined(LIPGEO_HAVE_AVX2_TU) && defined(__x86_64__)
            if (s == "avx2" && __builtin_cpu_supports("avx2"))
                return &avx2_backend();
#endif
        }
        return pick_default();
    }();
    return b;
}

}  // namespace

const Backend& active() { return *current(); }

void set_backend(const std::string& name) {
    if (name == "scalar") {
        current() = &scalar_backend();
        return;
    }
#if defined(LIPGEO_HAVE_AVX2_TU) && defined(__x86_64__)
    if (name == "avx2") {
        if (!__builtin_cpu_supports("avx2"))
            throw std::runtime_error("kernels: avx2 not supported on this cpu");
        current() = &avx2_backend();
        return;
    }
#endif
    if (name == "auto") {
        current() = pick_default();
        return;
    }
    throw std::runtime_error("kernels: unknown backend '" + name + "'");
}

namespace {
unsigned& worker_count() {
    static unsigned n = 1;
    return n;
}
}  // namespace

void set_workers(unsigned n) { worker_count() = std::max(1u, n); }
unsigned workers() { return worker_count(); }

double parallel_chunk_max(std::size_t n,
                          double (*chunk_max)(std::size_t, std::size_t, void*),
                          void* ctx) {
    const unsigned w = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
    if (w <= 1 || n < 2) return chunk_max(0, n, ctx);
    std::vector<double> partial(w, -std::numeric_limits<double>::infinity());
    std::vector<std::thread> pool;
    const std::size_t step = (n + w - 1) / w;
    for (unsigned t = 0; t < w; ++t) {
        const std::size_t lo = std::min(n, t * step);
        const std::size_t hi = std::min(n, lo + step);
        pool.emplace_back([&, t, lo, hi] { partial[t] = chunk_max(lo, hi, ctx); });
    }
    for (auto& th : pool) th.join();
    double best = partial[0];
    for (double v : partial) best = std::max(best, v);
    return best;
}

}  // namespace lipgeo::kernels
