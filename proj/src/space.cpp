#include "lipgeo/space.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_map>

#include "lipgeo/kernels.hpp"

namespace lipgeo {
namespace {

std::string pair_msg(const char* what, Index i, Index j) {
    std::ostringstream os;
    os << what << " at pair (" << i << ", " << j << ")";
    return os.str();
}

}  // namespace

FiniteMetricSpace FiniteMetricSpace::from_coords(std::vector<std::string> ids,
                                                 std::vector<double> coords,
                                                 std::size_t dim, MetricKind kind,
                                                 std::vector<double> weights,
                                                 double tol, std::uint64_t seed) {
    if (kind != MetricKind::Euclidean && kind != MetricKind::MaxNorm)
        throw InputError("from_coords: kind must be euclidean or max");
    if (dim == 0) throw InputError("from_coords: dim must be >= 1");
    if (ids.size() != weights.size() || coords.size() != ids.size() * dim)
        throw InputError("from_coords: inconsistent sizes");
    if (ids.empty()) throw InputError("from_coords: empty point set");
    FiniteMetricSpace s;
    s.ids_ = std::move(ids);
    s.weights_ = std::move(weights);
    s.kind_ = kind;
    s.dim_ = dim;
    s.coords_ = std::move(coords);
    s.validate(tol, seed);
    return s;
}

FiniteMetricSpace FiniteMetricSpace::from_matrix(std::vector<std::string> ids,
                                                 std::vector<double> matrix,
                                                 std::vector<double> weights,
                                                 double tol, std::uint64_t seed) {
    const std::size_t n = ids.size();
    if (n == 0) throw InputError("from_matrix: empty point set");
    if (weights.size() != n || matrix.size() != n * n)
        throw InputError("from_matrix: inconsistent sizes");
    FiniteMetricSpace s;
    s.ids_ = std::move(ids);
    s.weights_ = std::move(weights);
    s.kind_ = MetricKind::Matrix;
    s.matrix_ = std::move(matrix);
    s.validate(tol, seed);
    return s;
}

FiniteMetricSpace FiniteMetricSpace::from_split1d(std::vector<std::string> ids,
                                                  std::vector<double> hi,
                                                  std::vector<double> lo,
                                                  std::vector<double> weights,
                                                  double tol) {
    const std::size_t n = ids.size();
    if (n == 0) throw InputError("from_split1d: empty point set");
    if (hi.size() != n || lo.size() != n || weights.size() != n)
        throw InputError("from_split1d: inconsistent sizes");
    FiniteMetricSpace s;
    s.ids_ = std::move(ids);
    s.weights_ = std::move(weights);
    s.kind_ = MetricKind::Split1d;
    s.dim_ = 1;
    s.coords_ = std::move(hi);
    s.coords_lo_ = std::move(lo);
    // Split1d is |x - y| on the line: symmetric and triangle by construction.
    for (Index i = 0; i < n; ++i) {
        if (!(s.weights_[i] >= 0.0))
            throw InputError("negative weight at point " + std::to_string(i));
        s.total_mass_ += s.weights_[i];
    }
    (void)tol;
    return s;
}

double FiniteMetricSpace::dist(Index i, Index j) const {
    switch (kind_) {
        case MetricKind::Matrix:
            return matrix_[i * size() + j];
        case MetricKind::Split1d:
            return std::fabs((coords_[i] - coords_[j]) + (coords_lo_[i] - coords_lo_[j]));
        case MetricKind::Euclidean: {
            double acc = 0.0;
            for (std::size_t k = 0; k < dim_; ++k) {
                const double diff = coords_[i * dim_ + k] - coords_[j * dim_ + k];
                acc += diff * diff;
            }
            return std::sqrt(acc);
        }
        case MetricKind::MaxNorm: {
            double acc = 0.0;
            for (std::size_t k = 0; k < dim_; ++k) {
                const double diff = std::fabs(coords_[i * dim_ + k] - coords_[j * dim_ + k]);
                if (diff > acc) acc = diff;
            }
            return acc;
        }
    }
    throw InternalError("dist: bad metric kind");
}

void FiniteMetricSpace::dist_row(Index i, double* out) const {
    const auto& k = kernels::active();
    switch (kind_) {
        case MetricKind::Matrix:
            std::copy_n(matrix_.data() + i * size(), size(), out);
            return;
        case MetricKind::Split1d:
            k.split1d_row(coords_.data(), coords_lo_.data(), size(), i, out);
            return;
        case MetricKind::Euclidean:
            k.euclidean_row(coords_.data(), size(), dim_, i, out);
            return;
        case MetricKind::MaxNorm:
            k.maxnorm_row(coords_.data(), size(), dim_, i, out);
            return;
    }
    throw InternalError("dist_row: bad metric kind");
}

double FiniteMetricSpace::diameter() const {
    if (diameter_ >= 0.0) return diameter_;
    double best = 0.0;
    std::vector<double> row(size());
    for (Index i = 0; i < size(); ++i) {
        dist_row(i, row.data());
        for (Index j = i + 1; j < size(); ++j)
            if (row[j] > best) best = row[j];
    }
    diameter_ = best;
    return best;
}

Index FiniteMetricSpace::index_of(const std::string& id) const {
    for (Index i = 0; i < size(); ++i)
        if (ids_[i] == id) return i;
    throw InputError("unknown point id '" + id + "'");
}

void FiniteMetricSpace::validate(double tol, std::uint64_t seed) const {
    const std::size_t n = size();
    double mass = 0.0;
    for (Index i = 0; i < n; ++i) {
        if (!(weights_[i] >= 0.0))
            throw InputError("negative weight at point " + std::to_string(i));
        mass += weights_[i];
    }
    const_cast<FiniteMetricSpace*>(this)->total_mass_ = mass;
    if (!std::isfinite(mass)) throw InputError("total mass not finite");

    if (kind_ == MetricKind::Matrix) {
        for (Index i = 0; i < n; ++i) {
            if (std::fabs(matrix_[i * n + i]) > tol)
                throw InputError("nonzero diagonal at point " + std::to_string(i));
            for (Index j = 0; j < n; ++j) {
                const double d = matrix_[i * n + j];
                if (!(d >= 0.0))
                    throw InputError(pair_msg("negative distance", i, j));
                if (std::fabs(d - matrix_[j * n + i]) > tol)
                    throw InputError(pair_msg("asymmetry", i, j));
            }
        }
    }

    // Triangle inequality: exhaustive up to 500 points, 10000 seeded random
    // triples above that.
    auto check_triple = [&](Index a, Index b, Index c) {
        const double ab = dist(a, b), bc = dist(b, c), ac = dist(a, c);
        if (ac > ab + bc + tol) {
            std::ostringstream os;
            os << "triangle violation at (" << a << ", " << b << ", " << c << ")";
            throw InputError(os.str());
        }
    };
    if (n <= 500) {
        for (Index a = 0; a < n; ++a)
            for (Index b = a + 1; b < n; ++b)
                for (Index c = b + 1; c < n; ++c) {
                    check_triple(a, b, c);
                    check_triple(b, c, a);
                    check_triple(c, a, b);
                }
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<Index> pick(0, n - 1);
        for (int t = 0; t < 10000; ++t) {
            check_triple(pick(rng), pick(rng), pick(rng));
        }
    }
}

Net build_net(const FiniteMetricSpace& space, double eps) {
    if (!(eps > 0.0)) throw InputError("build_net: eps must be > 0");
    Net net;
    net.separation = eps;
    for (Index i = 0; i < space.size(); ++i) {
        bool far = true;
        for (Index m : net.members) {
            if (space.dist(i, m) < eps) {
                far = false;
                break;
            }
        }
        if (far) net.members.push_back(i);
    }
    return net;
}

namespace {

// Greedy cover of the index set `set` by sets of diameter <= cap: repeatedly
// take the lowest-index uncovered point and absorb every uncovered point
// that keeps the current set's diameter within cap.
std::size_t greedy_cover_count(const FiniteMetricSpace& space,
                               const std::vector<Index>& set, double cap) {
    std::vector<bool> covered(set.size(), false);
    std::size_t n_sets = 0;
    for (std::size_t s = 0; s < set.size(); ++s) {
        if (covered[s]) continue;
        ++n_sets;
        std::vector<Index> members{set[s]};
        covered[s] = true;
        for (std::size_t t = s + 1; t < set.size(); ++t) {
            if (covered[t]) continue;
            bool fits = true;
            for (Index m : members) {
                if (space.dist(set[t], m) > cap) {
                    fits = false;
                    break;
                }
            }
            if (fits) {
                covered[t] = true;
                members.push_back(set[t]);
            }
        }
    }
    return n_sets;
}

}  // namespace

AssouadEstimate estimate_assouad(const FiniteMetricSpace& space,
                                 const std::vector<std::pair<double, double>>& scale_pairs,
                                 std::size_t max_sets, std::uint64_t seed) {
    if (scale_pairs.empty()) throw InputError("estimate_assouad: empty scale list");
    AssouadEstimate est;
    if (space.size() == 1) {
        est.exponent = 0.0;
        return est;
    }

    std::vector<Index> centers;
    if (space.size() <= max_sets) {
        for (Index i = 0; i < space.size(); ++i) centers.push_back(i);
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<Index> pick(0, space.size() - 1);
        for (std::size_t t = 0; t < max_sets; ++t) centers.push_back(pick(rng));
        std::sort(centers.begin(), centers.end());
        centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
    }

    std::vector<double> row(space.size());
    for (const auto& [big, small] : scale_pairs) {
        if (!(big > 0.0) || !(small > 0.0) || !(small < big))
            throw InputError("estimate_assouad: need 0 < eps*N < N in each pair");
        for (Index c : centers) {
            space.dist_row(c, row.data());
            std::vector<Index> ball;
            for (Index j = 0; j < space.size(); ++j)
                if (row[j] <= big / 2.0) ball.push_back(j);
            if (ball.size() < 2) continue;
            AssouadEntry e;
            e.big_scale = big;
            e.small_scale = small;
            e.center = c;
            e.count = greedy_cover_count(space, ball, small);
            e.exponent = e.count <= 1
                             ? 0.0
                             : std::log(double(e.count)) / std::log(big / small);
            est.table.push_back(e);
            if (e.exponent > est.exponent) est.exponent = e.exponent;
        }
    }
    return est;
}

RestrictedSpace restrict(const FiniteMetricSpace& space,
                         const std::vector<Index>& subset) {
    if (subset.empty()) throw InputError("restrict: empty subset");
    const std::size_t m = subset.size();
    std::vector<std::string> ids(m);
    std::vector<double> weights(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (subset[i] >= space.size()) throw InputError("restrict: index out of range");
        ids[i] = space.id(subset[i]);
        weights[i] = space.weight(subset[i]);
    }
    if (space.has_coords()) {
        std::vector<double> coords(m * space.dim());
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = 0; k < space.dim(); ++k)
                coords[i * space.dim() + k] = space.coord(subset[i], k);
        return RestrictedSpace{
            FiniteMetricSpace::from_coords(std::move(ids), std::move(coords),
                                           space.dim(), space.metric_kind(),
                                           std::move(weights)),
            subset};
    }
    std::vector<double> matrix(m * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            matrix[i * m + j] = space.dist(subset[i], subset[j]);
    return RestrictedSpace{FiniteMetricSpace::from_matrix(std::move(ids), std::move(matrix),
                                                          std::move(weights)),
                           subset};
}

// Generators cap their output so a mistyped CLI parameter cannot request an
// astronomically large space.
constexpr std::size_t kMaxGeneratedPoints = 10'000'000;

FiniteMetricSpace make_grid(std::size_t side, std::size_t dim) {
    if (side == 0 || dim == 0) throw InputError("make_grid: side and dim must be >= 1");
    std::size_t n = 1;
    for (std::size_t k = 0; k < dim; ++k) {
        if (n > kMaxGeneratedPoints / side)
            throw InputError("make_grid: requested grid exceeds the size cap");
        n *= side;
    }
    std::vector<std::string> ids(n);
    std::vector<double> coords(n * dim);
    std::vector<double> weights(n, 1.0 / double(n));
    const double step = side > 1 ? 1.0 / double(side - 1) : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t rem = i;
        std::ostringstream os;
        os << "p" << i;
        ids[i] = os.str();
        for (std::size_t k = 0; k < dim; ++k) {
            coords[i * dim + k] = double(rem % side) * step;
            rem /= side;
        }
    }
    return FiniteMetricSpace::from_coords(std::move(ids), std::move(coords), dim,
                                          MetricKind::Euclidean, std::move(weights));
}

FiniteMetricSpace make_segment(std::size_t n) {
    if (n == 0) throw InputError("make_segment: n must be >= 1");
    std::vector<std::string> ids(n);
    std::vector<double> coords(n);
    std::vector<double> weights(n, 1.0 / double(n));
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = "p" + std::to_string(i);
        coords[i] = n > 1 ? double(i) / double(n - 1) : 0.0;
    }
    return FiniteMetricSpace::from_coords(std::move(ids), std::move(coords), 1,
                                          MetricKind::Euclidean, std::move(weights));
}

std::vector<double> cantor_endpoints(std::size_t level) {
    if (level > 20)
        throw InputError("cantor_endpoints: level exceeds the size cap");
    // Intervals of the level-k construction, kept as exact integer triples
    // a/3^k : [a, a+1] scaled.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> iv{{0, 1}};  // times 3^-0
    double scale = 1.0;
    for (std::size_t g = 0; g < level; ++g) {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> next;
        next.reserve(iv.size() * 2);
        for (auto [a, b] : iv) {
            // [a,b]/3^g splits into [3a,3a+1]/3^{g+1} and [3b-1,3b]/3^{g+1}.
            next.emplace_back(3 * a, 3 * a + 1);
            next.emplace_back(3 * b - 1, 3 * b);
        }
        iv = std::move(next);
        scale /= 3.0;
    }
    std::vector<double> pts;
    pts.reserve(iv.size() * 2);
    const double denom = std::pow(3.0, double(level));
    for (auto [a, b] : iv) {
        pts.push_back(double(a) / denom);
        pts.push_back(double(b) / denom);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

std::vector<CantorGap> cantor_gaps(std::size_t level) {
    std::vector<CantorGap> gaps;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> iv{{0, 1}};
    for (std::size_t g = 1; g <= level; ++g) {
        const double denom = std::pow(3.0, double(g));
        std::vector<std::pair<std::uint64_t, std::uint64_t>> next;
        for (auto [a, b] : iv) {
            next.emplace_back(3 * a, 3 * a + 1);
            next.emplace_back(3 * b - 1, 3 * b);
            gaps.push_back({double(3 * a + 1) / denom, double(3 * b - 1) / denom, g});
        }
        iv = std::move(next);
    }
    return gaps;
}

FiniteMetricSpace make_cantor(std::size_t level) {
    auto pts = cantor_endpoints(level);
    const std::size_t n = pts.size();
    std::vector<std::string> ids(n);
    std::vector<double> weights(n, 1.0 / double(n));
    for (std::size_t i = 0; i < n; ++i) ids[i] = "c" + std::to_string(i);
    return FiniteMetricSpace::from_coords(std::move(ids), std::move(pts), 1,
                                          MetricKind::Euclidean, std::move(weights));
}

CantorInAmbient make_cantor_in_grid(std::size_t level, std::size_t ambient_level) {
    if (ambient_level < level)
        throw InputError("make_cantor_in_grid: ambient must be at least as fine");
    if (ambient_level > 14)
        throw InputError("make_cantor_in_grid: ambient level exceeds the size cap");
    const std::size_t steps = std::size_t(std::llround(std::pow(3.0, double(ambient_level))));
    const std::size_t n = steps + 1;
    std::vector<std::string> ids(n);
    std::vector<double> coords(n);
    std::vector<double> weights(n, 1.0 / double(n));
    const double denom = double(steps);
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = "g" + std::to_string(i);
        coords[i] = double(i) / denom;
    }
    CantorInAmbient out{FiniteMetricSpace::from_coords(std::move(ids), std::move(coords),
                                                       1, MetricKind::Euclidean,
                                                       std::move(weights)),
                        {}};
    // Cantor endpoints are multiples of 3^-level, hence grid points.
    const double fine = std::pow(3.0, double(ambient_level - level));
    for (double p : cantor_endpoints(level)) {
        const auto idx = std::size_t(std::llround(p * std::pow(3.0, double(level)) * fine));
        out.cantor_points.push_back(idx);
    }
    return out;
}

}  // namespace lipgeo
