#pragma once

#include <functional>
#include <vector>

#include "lipgeo/common.hpp"
#include "lipgeo/fragment.hpp"
#include "lipgeo/space.hpp"

namespace lipgeo {

/// Net node (z, v, t): base point, transverse position, axial value.
struct ChainNode {
    Index base = 0;
    std::vector<double> v;  // q-1 transverse components (may be empty)
    double t = 0.0;
};

/// The delta,alpha chain order on nodes:
///   x <= y  iff  t_y - t_x >= delta * d(z_x, z_y) - tol
///          and  (t_y - t_x) * tan(alpha) >= |v_x - v_y| - tol.
/// Exactly equal nodes are deduplicated before ordering so floating data
/// cannot create 2-cycles. With no transverse components the second
/// inequality is vacuous.
class ChainPoset {
public:
    ChainPoset(std::vector<ChainNode> nodes, double delta, double alpha,
               std::function<double(Index, Index)> base_dist,
               double tol = kDefaultTol);

    std::size_t size() const { return nodes_.size(); }
    const ChainNode& node(std::size_t i) const { return nodes_[i]; }
    const std::vector<ChainNode>& nodes() const { return nodes_; }
    double delta() const { return delta_; }
    double alpha() const { return alpha_; }

    /// Strict order: i precedes j (i != j and i <= j).
    bool precedes(std::size_t i, std::size_t j) const;
    bool comparable(std::size_t i, std::size_t j) const {
        return precedes(i, j) || precedes(j, i);
    }

    /// Fully checked for <= 300 nodes, sampled above; throws InternalError on
    /// a transitivity failure (cannot happen when base_dist is a metric).
    void check_transitivity(std::uint64_t seed = 7) const;

private:
    std::vector<ChainNode> nodes_;
    double delta_, alpha_, tol_, tan_alpha_;
    std::function<double(Index, Index)> base_dist_;
};

struct LongestChain {
    std::size_t length = 0;
    std::vector<std::size_t> chain;  // node indices, ascending axial value
};

/// Longest chain by dynamic programming over nodes sorted by t (ties by node
/// index); witness reconstruction breaks ties toward the lowest predecessor
/// index, so the result is reproducible.
LongestChain longest_chain(const ChainPoset& poset);

/// Mirsky decomposition: level(x) = length of the longest chain ending at x;
/// antichain k = { x : level(x) = k+1 }. The number of antichains equals the
/// longest chain length.
std::vector<std::vector<std::size_t>> mirsky_decompose(const ChainPoset& poset);

/// Fragment from a chain: domain = axial values, trace = base points.
/// Certifies, for every pair, d(z_i, z_j) <= (t_j - t_i)/delta + tol and
/// |v_i - v_j| <= (t_j - t_i) tan(alpha) + tol; throws ValidationError
/// otherwise (e.g. when handed an antichain).
Fragment chain_to_fragment(const ChainPoset& poset,
                           const std::vector<std::size_t>& chain,
                           const FiniteMetricSpace& space,
                           double tol = kDefaultTol);

/// Hasse cover relation (edges i -> j with nothing strictly between), plus
/// Mirsky levels; used by the JSON dump and golden tests.
struct PosetDump {
    std::vector<std::pair<std::size_t, std::size_t>> hasse_edges;
    std::vector<std::size_t> level;  // 1-based Mirsky level per node
};
PosetDump dump_poset(const ChainPoset& poset);

}  // namespace lipgeo
