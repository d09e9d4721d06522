#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lipgeo/common.hpp"

namespace lipgeo {

/// How distances are produced. All kinds share the same contract: total,
/// symmetric, zero on the diagonal, triangle inequality.
enum class MetricKind {
    Euclidean,  // from coordinates, l2
    MaxNorm,    // from coordinates, l-infinity
    Matrix,     // explicit dense matrix
    Split1d,    // 1-D coordinates stored as anchor + tiny offset
};

/// A finite metric measure space (X, d, mu): ids, an exact distance oracle
/// and one nonnegative weight per point. Immutable once built; operations on
/// spaces are pure, so concurrent reads are safe.
class FiniteMetricSpace {
public:
    /// Empty space; assign from a factory before use.
    FiniteMetricSpace() = default;

    static FiniteMetricSpace from_coords(std::vector<std::string> ids,
                                         std::vector<double> coords,
                                         std::size_t dim, MetricKind kind,
                                         std::vector<double> weights,
                                         double tol = kDefaultTol,
                                         std::uint64_t seed = 0);

    static FiniteMetricSpace from_matrix(std::vector<std::string> ids,
                                         std::vector<double> matrix,
                                         std::vector<double> weights,
                                         double tol = kDefaultTol,
                                         std::uint64_t seed = 0);

    /// 1-D space where point i sits at hi[i] + lo[i]. Distances are computed
    /// as |(hi_i - hi_j) + (lo_i - lo_j)|, which keeps separations far below
    /// one ulp of the anchors meaningful. Used by the Zahorski sample
    /// generator, where scales reach ~1e-40.
    static FiniteMetricSpace from_split1d(std::vector<std::string> ids,
                                          std::vector<double> hi,
                                          std::vector<double> lo,
                                          std::vector<double> weights,
                                          double tol = kDefaultTol);

    std::size_t size() const { return weights_.size(); }
    double dist(Index i, Index j) const;
    /// Fills out[0..size) with distances from point i. The row form is what
    /// the pair-scan kernels consume.
    void dist_row(Index i, double* out) const;

    const std::vector<double>& weights() const { return weights_; }
    double weight(Index i) const { return weights_[i]; }
    double total_mass() const { return total_mass_; }
    double diameter() const;

    const std::string& id(Index i) const { return ids_[i]; }
    const std::vector<std::string>& ids() const { return ids_; }

    bool has_coords() const { return kind_ == MetricKind::Euclidean || kind_ == MetricKind::MaxNorm; }
    std::size_t dim() const { return dim_; }
    double coord(Index i, std::size_t k) const { return coords_[i * dim_ + k]; }
    const std::vector<double>& coords() const { return coords_; }
    MetricKind metric_kind() const { return kind_; }

    /// Index of the point with the given id; throws InputError if absent.
    Index index_of(const std::string& id) const;

private:
    void validate(double tol, std::uint64_t seed) const;

    std::vector<std::string> ids_;
    std::vector<double> weights_;
    double total_mass_ = 0.0;
    MetricKind kind_ = MetricKind::Matrix;
    std::size_t dim_ = 0;
    std::vector<double> coords_;   // coords (row-major) or hi for Split1d
    std::vector<double> coords_lo_;  // Split1d only
    std::vector<double> matrix_;   // Matrix only
    mutable double diameter_ = -1.0;
};

/// Maximal eps-separated subset, greedy scan in ascending point index.
struct Net {
    double separation = 0.0;
    std::vector<Index> members;
};

Net build_net(const FiniteMetricSpace& space, double eps);

/// One covering-count measurement: sets of diameter <= big_scale were covered
/// by greedily grown sets of diameter <= small_scale.
struct AssouadEntry {
    double big_scale = 0.0;
    double small_scale = 0.0;
    Index center = 0;      // sampled set = ball B(center, big_scale/2)
    std::size_t count = 0;
    double exponent = 0.0;  // log(count) / log(big/small)
};

struct AssouadEstimate {
    double exponent = 0.0;  // max over entries
    std::vector<AssouadEntry> table;
};

/// Covering-count dimension estimate over the given (N, eps*N) scale pairs.
/// Sampled sets are balls of radius N/2 around every point (or a seeded
/// sample of max_sets centers when the space is large).
AssouadEstimate estimate_assouad(const FiniteMetricSpace& space,
                                 const std::vector<std::pair<double, double>>& scale_pairs,
                                 std::size_t max_sets = 64,
                                 std::uint64_t seed = 1);

/// Induced submetric on the subset, weights carried over. parent_index maps
/// output indices back to the input space.
struct RestrictedSpace {
    FiniteMetricSpace space;
    std::vector<Index> parent_index;
};

RestrictedSpace restrict(const FiniteMetricSpace& space,
                         const std::vector<Index>& subset);

// Named generators used by the canonical examples and the acceptance suite.

/// side^d uniform grid on [0,1]^d, weights uniform summing to 1.
FiniteMetricSpace make_grid(std::size_t side, std::size_t dim = 2);

/// n equispaced points on [0,1], uniform weights summing to 1.
FiniteMetricSpace make_segment(std::size_t n);

/// Endpoints of the level-k middle-thirds Cantor construction (2^{k+1}
/// points), uniform weights summing to 1.
FiniteMetricSpace make_cantor(std::size_t level);

/// Cantor endpoints of the given level embedded in the uniform grid of
/// spacing 3^-ambient_level on [0,1]; returns the ambient space plus the
/// indices of the Cantor endpoints within it. Weights uniform on the ambient.
struct CantorInAmbient {
    FiniteMetricSpace space;
    std::vector<Index> cantor_points;
};

CantorInAmbient make_cantor_in_grid(std::size_t level, std::size_t ambient_level);

/// The level-k Cantor endpoint coordinates (exact dyadic/triadic rationals in
/// double precision), ascending.
std::vector<double> cantor_endpoints(std::size_t level);

/// Closed gaps of the construction up to the given level: (left, right,
/// generation), where generation-g gaps have length 3^-g.
struct CantorGap {
    double left, right;
    std::size_t generation;
};
std::vector<CantorGap> cantor_gaps(std::size_t level);

}  // namespace lipgeo
