#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lipgeo/lipscape.hpp"
#include "lipgeo/space.hpp"

using namespace lipgeo;

namespace {

std::vector<double> dist_to(const FiniteMetricSpace& space,
                            const std::vector<Index>& S) {
    std::vector<double> f(space.size(), 1e300);
    for (Index i = 0; i < space.size(); ++i)
        for (Index s : S) f[i] = std::min(f[i], space.dist(i, s));
    return f;
}

std::vector<double> dyadic_scales(double top, int count) {
    std::vector<double> s;
    for (int j = 0; j < count; ++j) s.push_back(top * std::ldexp(1.0, -j));
    return s;
}

}  // namespace

TEST_CASE("lip profile: |x| at the origin and constants") {
    // Symmetric 1-D grid around 0.
    const std::size_t n = 21;
    std::vector<std::string> ids(n);
    std::vector<double> coords(n);
    std::vector<double> w(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = "p" + std::to_string(i);
        coords[i] = -1.0 + 2.0 * double(i) / double(n - 1);
    }
    auto space = FiniteMetricSpace::from_coords(std::move(ids), std::move(coords), 1,
                                                MetricKind::Euclidean, std::move(w));
    std::vector<double> f(n);
    for (Index i = 0; i < n; ++i) f[i] = std::fabs(space.coord(i, 0));

    auto prof = lip_profile(space, f, dyadic_scales(1.0, 4));
    const Index origin = (n - 1) / 2;
    for (std::size_t s = 0; s < prof.scales.size(); ++s) {
        CHECK(prof.biglip_at(origin, s) == doctest::Approx(1.0));
        CHECK(prof.smllip_at(origin, s) == doctest::Approx(1.0));
    }

    std::vector<double> c(n, 3.0);
    auto pc = lip_profile(space, c, dyadic_scales(1.0, 3));
    for (Index i = 0; i < n; ++i) {
        CHECK(pc.biglip_fine(i) == 0.0);
        CHECK(pc.smllip_fine(i) == 0.0);
    }
    CHECK_THROWS_AS(lip_profile(space, f, {}), InputError);
}

TEST_CASE("lip profile invariants: order and monotonicity") {
    auto amb = make_cantor_in_grid(3, 4);
    auto f = dist_to(amb.space, amb.cantor_points);
    auto prof = lip_profile(amb.space, f, dyadic_scales(0.5, 6));
    for (Index x = 0; x < amb.space.size(); ++x) {
        for (std::size_t s = 0; s < prof.scales.size(); ++s) {
            CHECK(prof.smllip_at(x, s) <= prof.biglip_at(x, s) + 1e-12);
            if (s > 0) {
                CHECK(prof.biglip_at(x, s) >= prof.biglip_at(x, s - 1) - 1e-12);
                CHECK(prof.smllip_at(x, s) <= prof.smllip_at(x, s - 1) + 1e-12);
            }
        }
    }
}

TEST_CASE("lip profile: distance to the Cantor sample at a gap") {
    auto amb = make_cantor_in_grid(4, 6);  // gaps down to 3^-4, grid 3^-6
    auto f = dist_to(amb.space, amb.cantor_points);
    auto prof = lip_profile(amb.space, f, {std::pow(3.0, -4.0), std::pow(3.0, -3.0)});
    // Every Cantor point adjacent to a generation-4 gap sees quotient >= 1/3
    // at scale ~3^-4 (the gap's interior grid points realize it).
    for (Index s : amb.cantor_points) {
        bool adjacent = false;
        for (const auto& gap : cantor_gaps(4)) {
            if (gap.generation == 4 &&
                (std::fabs(amb.space.coord(s, 0) - gap.left) < 1e-12 ||
                 std::fabs(amb.space.coord(s, 0) - gap.right) < 1e-12))
                adjacent = true;
        }
        if (adjacent) CHECK(prof.biglip_at(s, 0) >= 1.0 / 3.0 - 1e-9);
    }
}

TEST_CASE("liplip check: linear is 1 everywhere, constants pass vacuously") {
    auto seg = make_segment(40);
    std::vector<double> f(seg.size());
    for (Index i = 0; i < seg.size(); ++i) f[i] = 0.7 * seg.coord(i, 0);
    auto rep = liplip_check(seg, f, dyadic_scales(0.5, 5), 1e-9);
    CHECK(rep.flagged.empty());
    for (double r : rep.ratio) CHECK(r == doctest::Approx(1.0));
    CHECK(rep.keith_failing.empty());

    std::vector<double> c(seg.size(), 1.0);
    auto repc = liplip_check(seg, c, dyadic_scales(0.5, 5), 1e-9);
    CHECK(repc.flagged.empty());  // vacuous pass
}

TEST_CASE("porosity scan: dense set has no strong witnesses") {
    auto seg = make_segment(30);
    std::vector<Index> all(seg.size());
    for (Index i = 0; i < seg.size(); ++i) all[i] = i;
    auto scan = porosity_scan(seg, all, {0.3, 0.1});
    for (double c : scan.certified) CHECK(c == 0.0);

    // An eps-dense subset (every other point): witness constants capped by
    // eps over the annulus floor r/4.
    std::vector<Index> half;
    for (Index i = 0; i < seg.size(); i += 2) half.push_back(i);
    auto scan2 = porosity_scan(seg, half, {0.5});
    const double spacing = seg.dist(0, 1);
    CHECK(scan2.certified[0] <= spacing / (0.5 / 4.0) + 1e-12);
}

TEST_CASE("porosity scan: Cantor sample certifies c >= 1/4") {
    auto amb = make_cantor_in_grid(5, 6);
    std::vector<double> scales;
    for (int g = 2; g <= 4; ++g) scales.push_back(std::pow(3.0, -g) * 2.0);
    auto scan = porosity_scan(amb.space, amb.cantor_points, scales);
    for (double c : scan.certified) CHECK(c >= 0.25 - 1e-9);
}

TEST_CASE("porosity saturate: level-5 Cantor recertifies at 2c/3") {
    auto amb = make_cantor_in_grid(5, 6);
    std::vector<double> scales;
    for (int g = 2; g <= 4; ++g) scales.push_back(std::pow(3.0, -g) * 2.0);
    auto pre = porosity_scan(amb.space, amb.cantor_points, scales);
    double c = 1e300;
    for (double v : pre.certified) c = std::min(c, v);
    CHECK(c >= 0.25 - 1e-9);

    auto sat = porosity_saturate(amb.space, amb.cantor_points, c, scales, 0.01);
    CHECK(sat.points.size() > amb.cantor_points.size());
    for (std::size_t s = 0; s < scales.size(); ++s)
        CHECK(sat.recertified.certified[s] >= 2.0 * c / 3.0 - 0.01);

    // c beyond what the scan certifies is rejected.
    CHECK_THROWS_AS(porosity_saturate(amb.space, amb.cantor_points, 0.9, scales),
                    InputError);
}

TEST_CASE("gap detect: porous Cantor set is a gap candidate") {
    auto amb = make_cantor_in_grid(5, 6);
    auto f = dist_to(amb.space, amb.cantor_points);
    // Pool: monotone fragments inside S (f = 0 along them).
    std::vector<Fragment> pool;
    Fragment inside;
    for (Index s : amb.cantor_points) {
        inside.trace.push_back(s);
        inside.domain.push_back(amb.space.coord(s, 0));
    }
    pool.push_back(inside);

    auto verdict = gap_detect(amb.space, amb.cantor_points, f, 0.25, 0.0, pool,
                              dyadic_scales(0.5, 6));
    CHECK(verdict.gap_candidate);
    CHECK(verdict.max_estimate_on_S == 0.0);
    CHECK(verdict.min_biglip_on_S >= 0.25 - 1e-9);
    CHECK(verdict.label.find("pool-relative") != std::string::npos);
}

TEST_CASE("gap detect: grid interior with the full pool is not a gap") {
    auto grid = make_grid(8, 2);
    std::vector<double> f(grid.size());
    for (Index i = 0; i < grid.size(); ++i) f[i] = grid.coord(i, 0);
    std::vector<Fragment> pool;
    for (std::size_t r = 0; r < 8; ++r) {
        Fragment row;
        for (std::size_t cidx = 0; cidx < 8; ++cidx) {
            row.trace.push_back(r * 8 + cidx);
            row.domain.push_back(grid.coord(r * 8 + cidx, 0));
        }
        pool.push_back(std::move(row));
    }
    std::vector<Index> S;
    for (Index i = 0; i < grid.size(); ++i) S.push_back(i);
    auto verdict = gap_detect(grid, S, f, 1.0, 0.5, pool, dyadic_scales(0.5, 4));
    CHECK_FALSE(verdict.gap_candidate);  // estimate = biglip = 1 > beta
    CHECK(verdict.max_estimate_on_S == doctest::Approx(1.0));

    CHECK_THROWS_AS(gap_detect(grid, S, f, 0.2, 0.5, pool, dyadic_scales(0.5, 4)),
                    InputError);
}
