#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bitset>
#include <cmath>
#include <random>

#include "lipgeo/poset.hpp"
#include "lipgeo/space.hpp"

using namespace lipgeo;

namespace {

// Independent longest-chain oracle: boolean matrix powers of the strict
// order; the longest chain has length k iff R^{k-1} is nonzero and R^k is.
std::size_t longest_chain_matrix_oracle(const ChainPoset& poset) {
    const std::size_t n = poset.size();
    using Row = std::bitset<128>;
    std::vector<Row> rel(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (poset.precedes(i, j)) rel[i].set(j);
    std::vector<Row> power = rel;
    std::size_t length = 1;
    while (true) {
        bool nonzero = false;
        for (const auto& row : power)
            if (row.any()) {
                nonzero = true;
                break;
            }
        if (!nonzero) break;
        ++length;
        // power = power * rel
        std::vector<Row> next(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (power[i].test(j)) next[i] |= rel[j];
        power = std::move(next);
        if (length > n) throw std::logic_error("cycle in chain order");
    }
    return length;
}

std::vector<ChainNode> random_nodes(std::mt19937_64& rng, std::size_t n,
                                    std::size_t vdim, double geom = 2.0) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<ChainNode> nodes(n);
    for (auto& nd : nodes) {
        nd.base = 0;
        nd.t = geom * unit(rng);
        nd.v.resize(vdim);
        for (double& c : nd.v) c = unit(rng);
    }
    return nodes;
}

// Base distance from planted coordinates.
struct PlantedBase {
    std::vector<double> xs, ys;
    double operator()(Index a, Index b) const {
        return std::hypot(xs[a] - xs[b], ys[a] - ys[b]);
    }
};

PlantedBase planted_base(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PlantedBase base;
    base.xs.resize(n);
    base.ys.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        base.xs[i] = unit(rng);
        base.ys[i] = unit(rng);
    }
    return base;
}

}  // namespace

TEST_CASE("chain order basics") {
    auto d0 = [](Index, Index) { return 0.0; };
    // Same base point, equal v, increasing t: comparable.
    ChainPoset p({{0, {0.5}, 0.0}, {0, {0.5}, 1.0}}, 1.0, M_PI / 4.0, d0);
    CHECK(p.precedes(0, 1));
    CHECK_FALSE(p.precedes(1, 0));

    // t gap at half the required delta * d: incomparable.
    auto d1 = [](Index a, Index b) { return a == b ? 0.0 : 1.0; };
    ChainPoset q({{0, {}, 0.0}, {1, {}, 0.5}}, 1.0, M_PI / 4.0, d1);
    CHECK_FALSE(q.comparable(0, 1));

    CHECK_THROWS_AS(ChainPoset({}, 0.0, M_PI / 4.0, d0), InputError);
    CHECK_THROWS_AS(ChainPoset({}, 1.0, 2.0, d0), InputError);
}

TEST_CASE("duplicate nodes are merged, preserving antisymmetry") {
    auto d0 = [](Index, Index) { return 0.0; };
    ChainPoset p({{0, {0.5}, 1.0}, {0, {0.5}, 1.0}, {0, {0.5}, 2.0}}, 1.0,
                 M_PI / 4.0, d0);
    CHECK(p.size() == 2);
}

TEST_CASE("transitivity holds on random nodes") {
    std::mt19937_64 rng(101);
    auto base = planted_base(rng, 50);
    auto nodes = random_nodes(rng, 50, 1);
    for (auto& nd : nodes) nd.base = Index(rng() % 50);
    ChainPoset p(std::move(nodes), 0.7, 0.9, base);
    p.check_transitivity();  // throws on failure
}

TEST_CASE("longest chain: full chain and antichain") {
    auto d0 = [](Index, Index) { return 0.0; };
    std::vector<ChainNode> chain;
    for (int i = 0; i < 7; ++i) chain.push_back({0, {}, double(i)});
    ChainPoset p(chain, 1.0, M_PI / 4.0, d0);
    auto lc = longest_chain(p);
    CHECK(lc.length == 7);
    CHECK(lc.chain.size() == 7);

    // Pure antichain: far-apart bases, equal t gaps far below delta * d.
    auto dfar = [](Index a, Index b) { return a == b ? 0.0 : 100.0; };
    std::vector<ChainNode> anti;
    for (int i = 0; i < 5; ++i) anti.push_back({Index(i), {}, double(i) * 0.01});
    ChainPoset q(anti, 1.0, M_PI / 4.0, dfar);
    CHECK(longest_chain(q).length == 1);
    auto decomp = mirsky_decompose(q);
    CHECK(decomp.size() == 1);
    CHECK(decomp[0].size() == 5);
}

TEST_CASE("mirsky: chain of 5 gives singleton antichains") {
    auto d0 = [](Index, Index) { return 0.0; };
    std::vector<ChainNode> chain;
    for (int i = 0; i < 5; ++i) chain.push_back({0, {}, double(i)});
    ChainPoset p(chain, 1.0, M_PI / 4.0, d0);
    auto decomp = mirsky_decompose(p);
    CHECK(decomp.size() == 5);
    for (const auto& ac : decomp) CHECK(ac.size() == 1);
}

TEST_CASE("mirsky duality and longest chain against the matrix oracle") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 20 + rng() % 41;
        auto base = planted_base(rng, n);
        auto nodes = random_nodes(rng, n, trial % 2 ? 1 : 0);
        for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i].base = Index(i);
        ChainPoset p(std::move(nodes), 0.4 + 0.1 * double(trial % 4), 0.8, base);

        const auto lc = longest_chain(p);
        CHECK(lc.length == longest_chain_matrix_oracle(p));

        const auto decomp = mirsky_decompose(p);
        CHECK(decomp.size() == lc.length);

        // Antichains partition the nodes and are pairwise incomparable.
        std::size_t total = 0;
        for (const auto& ac : decomp) {
            total += ac.size();
            for (std::size_t a = 0; a < ac.size(); ++a)
                for (std::size_t b = a + 1; b < ac.size(); ++b)
                    CHECK_FALSE(p.comparable(ac[a], ac[b]));
        }
        CHECK(total == p.size());

        // Witness chain is a genuine chain.
        for (std::size_t a = 0; a + 1 < lc.chain.size(); ++a)
            CHECK(p.precedes(lc.chain[a], lc.chain[a + 1]));
    }
}

TEST_CASE("monotonicity: enlarging alpha or shrinking delta adds comparabilities") {
    std::mt19937_64 rng(31);
    auto base = planted_base(rng, 40);
    auto nodes = random_nodes(rng, 40, 1);
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i].base = Index(i);
    ChainPoset tight(nodes, 0.9, 0.6, base);
    ChainPoset loose(nodes, 0.5, 1.1, base);
    for (std::size_t i = 0; i < tight.size(); ++i)
        for (std::size_t j = 0; j < tight.size(); ++j)
            if (tight.precedes(i, j)) CHECK(loose.precedes(i, j));
    CHECK(longest_chain(loose).length >= longest_chain(tight).length);
}

TEST_CASE("chain_to_fragment: certificates and errors") {
    auto grid = make_grid(4, 2);
    // Vertical column nodes: base = column x=0 (indices 0, 4, 8, 12), t = y.
    std::vector<ChainNode> nodes;
    for (std::size_t r = 0; r < 4; ++r)
        nodes.push_back({Index(r * 4), {}, grid.coord(r * 4, 1)});
    ChainPoset p(nodes, 0.9, M_PI / 4.0,
                 [&](Index a, Index b) { return grid.dist(a, b); });
    auto lc = longest_chain(p);
    CHECK(lc.length == 4);
    auto frag = chain_to_fragment(p, lc.chain, grid);
    CHECK(frag.size() == 4);
    auto md = metric_differential(frag, grid);
    for (double v : md) CHECK(v == doctest::Approx(1.0));

    // Two-node chain: d = 1, dt = 2, delta = 1 -> base speed 1/2.
    auto d1 = [](Index a, Index b) { return a == b ? 0.0 : 1.0; };
    ChainPoset two({{0, {}, 0.0}, {1, {}, 2.0}}, 1.0, M_PI / 4.0, d1);
    auto seg = FiniteMetricSpace::from_matrix({"a", "b"}, {0, 1, 1, 0}, {1, 1});
    auto f2 = chain_to_fragment(two, {0, 1}, seg);
    CHECK(metric_differential(f2, seg)[0] == doctest::Approx(0.5));

    // An antichain is rejected by the certificate.
    auto dfar = [](Index a, Index b) { return a == b ? 0.0 : 100.0; };
    ChainPoset anti({{0, {}, 0.0}, {1, {}, 0.1}}, 1.0, M_PI / 4.0, dfar);
    auto far_space =
        FiniteMetricSpace::from_matrix({"a", "b"}, {0, 100, 100, 0}, {1, 1});
    CHECK_THROWS_AS(chain_to_fragment(anti, {0, 1}, far_space), ValidationError);
}

TEST_CASE("chain certificates pass on longest chains of random posets") {
    std::mt19937_64 rng(555);
    auto grid = make_grid(6, 2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<ChainNode> nodes;
        for (Index i = 0; i < grid.size(); ++i)
            if (unit(rng) < 0.6) nodes.push_back({i, {}, grid.coord(i, 1)});
        if (nodes.empty()) continue;
        ChainPoset p(std::move(nodes), 0.8, 0.7,
                     [&](Index a, Index b) { return grid.dist(a, b); });
        auto lc = longest_chain(p);
        if (lc.length < 2) continue;
        std::vector<std::size_t> chain;
        for (std::size_t idx : lc.chain)
            if (chain.empty() || p.node(idx).t > p.node(chain.back()).t)
                chain.push_back(idx);
        if (chain.size() < 2) continue;
        CHECK_NOTHROW(chain_to_fragment(p, chain, grid));
    }
}

TEST_CASE("hasse dump") {
    auto d0 = [](Index, Index) { return 0.0; };
    std::vector<ChainNode> chain;
    for (int i = 0; i < 4; ++i) chain.push_back({0, {}, double(i)});
    ChainPoset p(chain, 1.0, M_PI / 4.0, d0);
    auto dump = dump_poset(p);
    CHECK(dump.hasse_edges.size() == 3);  // covers only
    CHECK(dump.level == std::vector<std::size_t>{1, 2, 3, 4});
}
