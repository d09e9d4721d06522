#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lipgeo/space.hpp"

using namespace lipgeo;

TEST_CASE("two points at distance 1 build a valid space") {
    auto s = FiniteMetricSpace::from_matrix({"a", "b"}, {0, 1, 1, 0}, {1, 1});
    CHECK(s.size() == 2);
    CHECK(s.dist(0, 1) == 1.0);
    CHECK(s.total_mass() == 2.0);
}

TEST_CASE("asymmetric matrix is rejected naming the pair") {
    CHECK_THROWS_WITH_AS(
        FiniteMetricSpace::from_matrix({"a", "b"}, {0, 1, 2, 0}, {1, 1}),
        doctest::Contains("asymmetry"), InputError);
}

TEST_CASE("negative weight and triangle violations are rejected") {
    CHECK_THROWS_AS(FiniteMetricSpace::from_matrix({"a", "b"}, {0, 1, 1, 0}, {1, -1}),
                    InputError);
    // d(a,c) = 5 > 1 + 1
    CHECK_THROWS_WITH_AS(
        FiniteMetricSpace::from_matrix({"a", "b", "c"},
                                       {0, 1, 5, 1, 0, 1, 5, 1, 0}, {1, 1, 1}),
        doctest::Contains("triangle"), InputError);
}

TEST_CASE("grid generator: 16 points, unit mass") {
    auto g = make_grid(4, 2);
    CHECK(g.size() == 16);
    CHECK(g.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.dist(0, 1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("net: greedy scan on 11 equispaced points, eps = 0.25") {
    auto seg = make_segment(11);
    auto net = build_net(seg, 0.25);
    CHECK(net.members == std::vector<Index>{0, 3, 6, 9});
}

TEST_CASE("net: degenerate separations") {
    auto seg = make_segment(5);
    auto all = build_net(seg, 0.1);  // below min spacing 0.25
    CHECK(all.members.size() == 5);
    auto one = build_net(seg, 2.0);  // above diameter
    CHECK(one.members == std::vector<Index>{0});
}

TEST_CASE("net is separated and maximal") {
    auto g = make_grid(6, 2);
    for (double eps : {0.15, 0.3, 0.7}) {
        auto net = build_net(g, eps);
        for (std::size_t a = 0; a < net.members.size(); ++a)
            for (std::size_t b = a + 1; b < net.members.size(); ++b)
                CHECK(g.dist(net.members[a], net.members[b]) >= eps);
        for (Index i = 0; i < g.size(); ++i) {
            double dmin = 1e300;
            for (Index m : net.members) dmin = std::min(dmin, g.dist(i, m));
            CHECK(dmin < eps);
        }
    }
}

TEST_CASE("assouad estimate: single point is 0") {
    auto s = FiniteMetricSpace::from_matrix({"a"}, {0}, {1});
    CHECK(estimate_assouad(s, {{1.0, 0.5}}).exponent == 0.0);
    CHECK_THROWS_AS(estimate_assouad(s, {}), InputError);
}

TEST_CASE("assouad estimate: 1-D grid lands near 1") {
    auto seg = make_segment(101);
    std::vector<std::pair<double, double>> pairs;
    for (int j = 1; j <= 4; ++j) {
        const double eps = std::ldexp(1.0, -j);
        pairs.push_back({1.0, eps});
    }
    auto est = estimate_assouad(seg, pairs, 32, 5);
    CHECK(est.exponent >= 0.8);
    CHECK(est.exponent <= 1.2);
}

TEST_CASE("assouad estimate: 2-D grid lands near 2") {
    auto g = make_grid(32, 2);
    std::vector<std::pair<double, double>> pairs;
    for (int j = 2; j <= 4; ++j) {
        const double eps = std::ldexp(1.0, -j);
        pairs.push_back({1.0, eps});
    }
    auto est = estimate_assouad(g, pairs, 16, 5);
    CHECK(est.exponent >= 1.7);
    CHECK(est.exponent <= 2.3);
}

TEST_CASE("assouad monotone under restriction") {
    auto g = make_grid(12, 2);
    std::vector<Index> half;
    for (Index i = 0; i < g.size() / 2; ++i) half.push_back(i);
    auto sub = restrict(g, half);
    std::vector<std::pair<double, double>> pairs{{1.0, 0.25}, {0.5, 0.125}};
    const double full = estimate_assouad(g, pairs, 24, 3).exponent;
    const double part = estimate_assouad(sub.space, pairs, 24, 3).exponent;
    CHECK(part <= full + 0.1);
}

TEST_CASE("restrict: identity, column, and mass additivity") {
    auto g = make_grid(4, 2);
    std::vector<Index> all(g.size());
    for (Index i = 0; i < g.size(); ++i) all[i] = i;
    auto same = restrict(g, all);
    CHECK(same.space.size() == g.size());
    CHECK(same.space.dist(3, 9) == g.dist(3, 9));

    // One column: x = 0 -> indices 0, 4, 8, 12 (x = i % side).
    std::vector<Index> col{0, 4, 8, 12};
    auto sub = restrict(g, col);
    CHECK(sub.space.size() == 4);
    CHECK(sub.space.dist(0, 1) == doctest::Approx(1.0 / 3.0));
    double mass = 0.0;
    for (Index i : col) mass += g.weight(i);
    CHECK(sub.space.total_mass() == doctest::Approx(mass));
    CHECK_THROWS_AS(restrict(g, {}), InputError);
}

TEST_CASE("cantor endpoints and gaps") {
    auto pts = cantor_endpoints(2);
    CHECK(pts == std::vector<double>{0.0, 1.0 / 9, 2.0 / 9, 1.0 / 3, 2.0 / 3,
                                     7.0 / 9, 8.0 / 9, 1.0});
    auto gaps = cantor_gaps(2);
    CHECK(gaps.size() == 3);
    CHECK(gaps[0].left == doctest::Approx(1.0 / 3));
    CHECK(gaps[0].right == doctest::Approx(2.0 / 3));
    CHECK(gaps[0].generation == 1);

    auto c = make_cantor(2);
    CHECK(c.size() == 8);
    auto amb = make_cantor_in_grid(2, 4);
    CHECK(amb.space.size() == 82);
    CHECK(amb.cantor_points.size() == 8);
    for (Index i : amb.cantor_points) CHECK(i < amb.space.size());
    CHECK(amb.space.coord(amb.cantor_points[1], 0) == doctest::Approx(1.0 / 9));
}

TEST_CASE("generator size caps") {
    CHECK_THROWS_AS(make_grid(100000, 3), InputError);
    CHECK_THROWS_AS(make_cantor_in_grid(3, 20), InputError);
}

TEST_CASE("split1d keeps sub-ulp separations") {
    auto s = FiniteMetricSpace::from_split1d({"a", "b", "c"}, {0.5, 0.5, 0.75},
                                             {0.0, 1e-40, 0.0}, {1, 1, 1});
    CHECK(s.dist(0, 1) == 1e-40);
    CHECK(s.dist(0, 2) == doctest::Approx(0.25));
}
