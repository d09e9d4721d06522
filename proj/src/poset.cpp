#include "lipgeo/poset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace lipgeo {
namespace {

double transverse_dist(const ChainNode& a, const ChainNode& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.v.size(); ++k) {
        const double diff = a.v[k] - b.v[k];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

bool nodes_equal(const ChainNode& a, const ChainNode& b,
                 const std::function<double(Index, Index)>& dist) {
    if (a.t != b.t || a.v.size() != b.v.size()) return false;
    for (std::size_t k = 0; k < a.v.size(); ++k)
        if (a.v[k] != b.v[k]) return false;
    return a.base == b.base || dist(a.base, b.base) == 0.0;
}

}  // namespace

ChainPoset::ChainPoset(std::vector<ChainNode> nodes, double delta, double alpha,
                       std::function<double(Index, Index)> base_dist, double tol)
    : delta_(delta), alpha_(alpha), tol_(tol), base_dist_(std::move(base_dist)) {
    if (!(delta > 0.0)) throw InputError("chain order: delta must be > 0");
    if (!(alpha > 0.0) || !(alpha < M_PI / 2.0))
        throw InputError("chain order: alpha must lie in (0, pi/2)");
    tan_alpha_ = std::tan(alpha);
    const std::size_t dim = nodes.empty() ? 0 : nodes.front().v.size();
    for (const auto& nd : nodes)
        if (nd.v.size() != dim)
            throw InputError("chain order: inconsistent transverse dimension");
    // Deduplicate exactly-equal nodes; antisymmetry depends on it.
    for (auto& nd : nodes) {
        bool dup = false;
        for (const auto& kept : nodes_) {
            if (nodes_equal(nd, kept, base_dist_)) {
                dup = true;
                break;
            }
        }
        if (!dup) nodes_.push_back(std::move(nd));
    }
}

bool ChainPoset::precedes(std::size_t i, std::size_t j) const {
    if (i == j) return false;
    const ChainNode& a = nodes_[i];
    const ChainNode& b = nodes_[j];
    const double dt = b.t - a.t;
    if (dt < 0.0) return false;
    if (dt < delta_ * base_dist_(a.base, b.base) - tol_) return false;
    if (!a.v.empty() && dt * tan_alpha_ < transverse_dist(a, b) - tol_) return false;
    // Guard antisymmetry for distinct nodes at identical positions.
    if (dt == 0.0 && i > j && precedes(j, i)) return false;
    return true;
}

void ChainPoset::check_transitivity(std::uint64_t seed) const {
    const std::size_t n = size();
    auto check = [&](std::size_t a, std::size_t b, std::size_t c) {
        if (a != b && b != c && a != c && precedes(a, b) && precedes(b, c) &&
            !precedes(a, c))
            throw InternalError("chain order: transitivity failed");
    };
    if (n <= 300) {
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c) check(a, b, c);
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (int t = 0; t < 30000; ++t) check(pick(rng), pick(rng), pick(rng));
    }
}

namespace {

// Nodes sorted by (t, index): every strict predecessor appears earlier,
// because i <= j implies t_i <= t_j and ties are never comparable both ways.
std::vector<std::size_t> axial_order(const ChainPoset& poset) {
    std::vector<std::size_t> order(poset.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (poset.node(a).t != poset.node(b).t) return poset.node(a).t < poset.node(b).t;
        return a < b;
    });
    return order;
}

// level[i] = length of the longest chain ending at node i.
std::vector<std::size_t> chain_levels(const ChainPoset& poset,
                                      std::vector<std::size_t>* best_pred) {
    const auto order = axial_order(poset);
    std::vector<std::size_t> level(poset.size(), 1);
    if (best_pred) best_pred->assign(poset.size(), SIZE_MAX);
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const std::size_t j = order[oi];
        for (std::size_t ok = 0; ok < oi; ++ok) {
            const std::size_t i = order[ok];
            if (poset.precedes(i, j) && level[i] + 1 > level[j]) {
                level[j] = level[i] + 1;
                if (best_pred) (*best_pred)[j] = i;
            } else if (best_pred && poset.precedes(i, j) && level[i] + 1 == level[j] &&
                       i < (*best_pred)[j]) {
                (*best_pred)[j] = i;
            }
        }
    }
    return level;
}

}  // namespace

LongestChain longest_chain(const ChainPoset& poset) {
    if (poset.size() == 0) throw InputError("longest_chain: empty poset");
    std::vector<std::size_t> pred;
    const auto level = chain_levels(poset, &pred);
    std::size_t end = 0;
    for (std::size_t i = 1; i < poset.size(); ++i) {
        if (level[i] > level[end]) end = i;
        // Deterministic witness: among maxima keep the lowest node index.
    }
    LongestChain out;
    out.length = level[end];
    for (std::size_t cur = end; cur != SIZE_MAX; cur = pred[cur])
        out.chain.push_back(cur);
    std::reverse(out.chain.begin(), out.chain.end());
    return out;
}

std::vector<std::vector<std::size_t>> mirsky_decompose(const ChainPoset& poset) {
    if (poset.size() == 0) throw InputError("mirsky_decompose: empty poset");
    const auto level = chain_levels(poset, nullptr);
    const std::size_t depth = *std::max_element(level.begin(), level.end());
    std::vector<std::vector<std::size_t>> antichains(depth);
    for (std::size_t i = 0; i < poset.size(); ++i)
        antichains[level[i] - 1].push_back(i);
    return antichains;
}

Fragment chain_to_fragment(const ChainPoset& poset,
                           const std::vector<std::size_t>& chain,
                           const FiniteMetricSpace& space, double tol) {
    if (chain.empty()) throw InputError("chain_to_fragment: empty chain");
    Fragment frag;
    for (std::size_t idx : chain) {
        frag.domain.push_back(poset.node(idx).t);
        frag.trace.push_back(poset.node(idx).base);
    }
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        if (!(frag.domain[i] < frag.domain[i + 1]))
            throw InputError("chain_to_fragment: repeated axial value");
    // Certificate: the chain inequalities for every pair.
    const double tan_alpha = std::tan(poset.alpha());
    for (std::size_t i = 0; i < chain.size(); ++i) {
        for (std::size_t j = i + 1; j < chain.size(); ++j) {
            const ChainNode& a = poset.node(chain[i]);
            const ChainNode& b = poset.node(chain[j]);
            const double dt = b.t - a.t;
            if (space.dist(a.base, b.base) > dt / poset.delta() + tol)
                throw ValidationError("chain_to_fragment: base certificate failed");
            if (transverse_dist(a, b) > dt * tan_alpha + tol)
                throw ValidationError("chain_to_fragment: transverse certificate failed");
        }
    }
    return frag;
}

PosetDump dump_poset(const ChainPoset& poset) {
    PosetDump dump;
    dump.level = chain_levels(poset, nullptr);
    const std::size_t n = poset.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!poset.precedes(i, j)) continue;
            bool covered = true;
            for (std::size_t k = 0; k < n && covered; ++k)
                if (k != i && k != j && poset.precedes(i, k) && poset.precedes(k, j))
                    covered = false;
            if (covered) dump.hasse_edges.emplace_back(i, j);
        }
    }
    return dump;
}

}  // namespace lipgeo
