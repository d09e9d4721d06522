#include "lipgeo/zahorski.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lipgeo/kernels.hpp"

namespace lipgeo {
namespace {

double sawtooth(double u, double h) {
    double m = std::fmod(u, 2.0 * h);
    if (m < 0.0) m += 2.0 * h;
    return h - std::fabs(m - h);
}

// Distance from u to the nearest multiple of h (the branch ends of the wave).
double branch_margin(double u, double h) {
    double m = std::fmod(u, h);
    if (m < 0.0) m += h;
    return std::min(m, h - m);
}

}  // namespace

TruncateResult truncate(const FiniteMetricSpace& space,
                        const std::vector<double>& f_values,
                        const std::vector<Index>& S, double h, double eps,
                        double L, double tol) {
    if (!(h > 0.0)) throw InputError("truncate: h must be > 0");
    if (!(eps > 0.0) || !(eps < h / 4.0))
        throw InputError("truncate: eps must lie in (0, h/4)");
    if (!(L > 0.0)) throw InputError("truncate: L must be > 0");
    if (S.empty()) throw InputError("truncate: empty S");
    const std::size_t n = space.size();

    std::vector<double> dist_S(n, std::numeric_limits<double>::infinity());
    std::vector<double> drow(n);
    for (Index s : S) {
        space.dist_row(s, drow.data());
        for (Index x = 0; x < n; ++x) dist_S[x] = std::min(dist_S[x], drow[x]);
    }
    double mu_S = 0.0;
    for (Index s : S) mu_S += space.weight(s);

    // Offset search: ceil(4h/eps) equispaced phases; keep the one maximising
    // mu(S'), ties to the smallest phase.
    const auto n_off = std::size_t(std::ceil(4.0 * h / eps));
    double best_off = 0.0, best_mass = -1.0;
    std::vector<Index> best_sprime;
    for (std::size_t c = 0; c < n_off; ++c) {
        const double off = 2.0 * h * (double(c) + 0.5) / double(n_off);
        std::vector<Index> sp;
        double mass = 0.0;
        for (Index s : S) {
            if (branch_margin(f_values[s] + off, h) > eps) {
                sp.push_back(s);
                mass += space.weight(s);
            }
        }
        if (mass > best_mass) {
            best_mass = mass;
            best_off = off;
            best_sprime = std::move(sp);
        }
    }

    TruncateResult out;
    out.offset = best_off;
    out.S_prime = std::move(best_sprime);
    out.s_prime_mass = mu_S > 0.0 ? best_mass / mu_S : 0.0;
    out.g.resize(n);
    for (Index x = 0; x < n; ++x) {
        const double cut = std::clamp(2.0 * h - L * dist_S[x], 0.0, h);
        out.g[x] = std::min(sawtooth(f_values[x] + best_off, h), cut);
    }

    // Contract audits. Everything here lives at magnitude h, so tolerances
    // scale with it.
    const double atol = std::max(tol * h, 1e-13 * h);
    auto fail = [](const char* what, Index a, Index b) {
        std::ostringstream os;
        os << "truncate: property " << what << " violated at pair (" << a << ", "
           << b << ")";
        throw ValidationError(os.str());
    };

    for (Index x = 0; x < n; ++x) {
        if (out.g[x] < -atol || out.g[x] > h + atol) fail("(1) range", x, x);
        if (dist_S[x] > 2.0 * h / L && out.g[x] > atol) fail("(2) support", x, x);
    }
    std::vector<Index> near_h;  // B(S, h/L)
    for (Index x = 0; x < n; ++x)
        if (dist_S[x] <= h / L) near_h.push_back(x);
    for (std::size_t a = 0; a < near_h.size(); ++a) {
        const Index x = near_h[a];
        for (std::size_t b = a + 1; b < near_h.size(); ++b) {
            const Index y = near_h[b];
            if (std::fabs(f_values[x] - f_values[y]) <
                std::fabs(out.g[x] - out.g[y]) - atol)
                fail("(3) contraction", x, y);
        }
    }
    if (best_mass < (1.0 - 4.0 * eps / h) * mu_S - atol) fail("(4) mass", 0, 0);
    for (Index x : out.S_prime) {
        space.dist_row(x, drow.data());
        for (Index y = 0; y < n; ++y) {
            if (drow[y] > eps / L) continue;
            if (std::fabs(std::fabs(f_values[x] - f_values[y]) -
                          std::fabs(out.g[x] - out.g[y])) > atol)
                fail("(4) equality", x, y);
        }
    }
    return out;
}

CantorFlatFamily::CantorFlatFamily(std::size_t level, double delta0,
                                   double slope_budget, double min_scale)
    : delta0_(delta0), min_scale_(min_scale) {
    if (!(delta0 > 0.0)) throw InputError("flat family: delta0 must be > 0");
    if (delta0 > slope_budget / 2.0)
        throw InputError("flat family: delta0 exceeds half the slope budget");
    slope_ = 1.25 * delta0;  // keeps the certified witness ratio above delta0
    if (!(min_scale > 0.0)) throw InputError("flat family: min_scale must be > 0");

    const auto endpoints = cantor_endpoints(level);
    const auto gaps = cantor_gaps(level);

    std::vector<std::string> ids;
    std::vector<double> hi, lo;

    for (std::size_t i = 0; i < endpoints.size(); ++i) {
        ids.push_back("s" + std::to_string(i));
        hi.push_back(endpoints[i]);
        lo.push_back(0.0);
        gap_of_point_.push_back(SIZE_MAX);
        penetration_.push_back(0.0);
    }
    for (std::size_t g = 0; g < gaps.size(); ++g) {
        const double len = gaps[g].right - gaps[g].left;
        gap_length_.push_back(len);
        // Geometric penetration ladders from both edges; rungs never pass
        // the middle third of the gap, so the two ladders stay len/3 apart.
        for (int side = 0; side < 2; ++side) {
            double p = len / 3.0;
            std::size_t j = 0;
            while (p >= min_scale) {
                ids.push_back("g" + std::to_string(g) + (side == 0 ? "l" : "r") +
                              std::to_string(j));
                hi.push_back(side == 0 ? gaps[g].left : gaps[g].right);
                lo.push_back(side == 0 ? p : -p);
                gap_of_point_.push_back(g);
                penetration_.push_back(p);
                p /= 3.0;
                ++j;
            }
        }
    }

    const std::size_t n = ids.size();
    std::vector<double> weights(n, 1.0 / double(n));
    space_ = FiniteMetricSpace::from_split1d(std::move(ids), std::move(hi),
                                             std::move(lo), std::move(weights));
    for (std::size_t i = 0; i < endpoints.size(); ++i)
        if (endpoints[i] != 0.0 && endpoints[i] != 1.0) S_.push_back(i);
}

FlatLevel CantorFlatFamily::level_for(double inv_m) const {
    if (!(inv_m > 0.0) || inv_m > 1.0)
        throw InputError("flat family: 1/m must lie in (0, 1]");
    // The witness search needs a ladder rung in ((2/9)/m, (2/3)/m]; base-3
    // ladders always contain one unless the scale is below the resolution.
    if ((2.0 / 9.0) * inv_m < min_scale_)
        throw InputError("flat family: resolution exhausted at 1/m = " +
                         std::to_string(inv_m));

    FlatLevel lvl;
    lvl.inv_m = inv_m;
    // The flat foot must stay below every endpoint's own-gap ladder or the
    // lift erases the witnesses; the smallest gap caps it at coarse scales.
    const double min_gap =
        *std::min_element(gap_length_.begin(), gap_length_.end());
    lvl.rho = std::min(inv_m, min_gap) / 27.0;
    const double cap = slope_ * (2.0 / 3.0) * inv_m;
    lvl.values.assign(space_.size(), 0.0);
    for (Index x = 0; x < space_.size(); ++x) {
        if (gap_of_point_[x] == SIZE_MAX) continue;
        lvl.values[x] =
            std::min(slope_ * std::max(penetration_[x] - lvl.rho, 0.0), cap);
    }
    audit_level(lvl);
    return lvl;
}

void CantorFlatFamily::audit_level(const FlatLevel& lvl) const {
    const std::size_t n = space_.size();
    std::vector<double> drow(n);
    for (Index x = 0; x < n; ++x) {
        space_.dist_row(x, drow.data());
        drow[x] = 0.0;  // excluded by the d > 0 mask
        const double lip = kernels::max_quotient(
            lvl.values[x], lvl.values.data(), drow.data(), 0.0,
            std::numeric_limits<double>::infinity(), n);
        if (lip > slope_ * (1.0 + 1e-12))
            throw InternalError("flat family: slope audit failed");
    }
    for (Index s : S_) {
        space_.dist_row(s, drow.data());
        double witness_ratio = 0.0;
        for (Index y = 0; y < n; ++y) {
            const double d = drow[y];
            if (d <= 0.0) continue;
            if (d <= lvl.rho && lvl.values[y] != 0.0)
                throw InternalError("flat family: flatness audit failed");
            if (d <= lvl.inv_m)
                witness_ratio =
                    std::max(witness_ratio, std::fabs(lvl.values[y] - lvl.values[s]) / d);
        }
        if (witness_ratio < delta0_)
            throw InputError("flat family: no delta0 witness at 1/m = " +
                             std::to_string(lvl.inv_m));
    }
}

double Schedule::tail(std::size_t K) const {
    if (K == 0 || K > rho.size()) throw InputError("schedule tail: bad depth");
    const double r = alpha * alpha / L;
    return 2.0 * (alpha * alpha / 4.0) *
           (1.0 + std::ldexp(r / (1.0 - r), -int(K) - 5)) * rho[K - 1];
}

IndependentResult build_independent(const CantorFlatFamily& family, std::size_t M,
                                    double alpha, double L, std::size_t depth,
                                    double tol) {
    if (M == 0) throw InputError("build_independent: M must be >= 1");
    if (depth < M)
        throw InputError("build_independent: depth must provide every residue class");
    const double delta0 = family.delta0();
    const double cap =
        std::min(0.5 * std::sqrt(delta0 * L / (1.0 + delta0)), 0.5 * delta0);
    if (!(alpha > 0.0) || !(alpha < cap))
        throw InputError("build_independent: alpha must lie in (0, " +
                         std::to_string(cap) + ")");
    const FiniteMetricSpace& space = family.space();
    const std::vector<Index>& S = family.S();
    const double a2L = alpha * alpha / L;

    IndependentResult out;
    out.M = M;
    Schedule& sched = out.schedule;
    sched.alpha = alpha;
    sched.L = L;

    std::vector<std::vector<Index>> sprimes;
    for (std::size_t k = 1; k <= depth; ++k) {
        double inv_m, h;
        if (k == 1) {
            inv_m = alpha * alpha / (64.0 * L);
            h = alpha * alpha / 4.0;
        } else {
            inv_m = alpha * alpha * sched.rho[k - 2] /
                    (std::ldexp(1.0, int(k) + 6) * L);
            h = (alpha * alpha / 4.0) * sched.rho[k - 2];
        }
        const double eps = L * inv_m;
        const FlatLevel lvl = family.level_for(inv_m);
        // Schedule induction: 1/m_k <= (a^2/L)^k 2^{-(k(k+1)/2 + 4k)}.
        const double bound = std::pow(a2L, double(k)) *
                             std::ldexp(1.0, -int(k * (k + 1) / 2 + 4 * k));
        if (inv_m > bound * (1.0 + 1e-12))
            throw InternalError("build_independent: schedule induction failed");

        auto tr = truncate(space, lvl.values, S, h, eps, L, tol);
        sched.inv_m.push_back(inv_m);
        sched.h.push_back(h);
        sched.eps.push_back(eps);
        sched.rho.push_back(lvl.rho);
        out.per_level_s_prime_mass.push_back(tr.s_prime_mass);
        out.g_levels.push_back(std::move(tr.g));
        sprimes.push_back(std::move(tr.S_prime));
    }

    // S' = intersection of the per-level S' sets.
    std::vector<std::size_t> count(space.size(), 0);
    for (const auto& sp : sprimes)
        for (Index x : sp) ++count[x];
    for (Index s : S)
        if (count[s] == depth) out.S_prime.push_back(s);

    out.psi.assign(M, std::vector<double>(space.size(), 0.0));
    for (std::size_t k = depth; k >= 1; --k) {
        auto& psi = out.psi[k % M];
        for (Index x = 0; x < space.size(); ++x) psi[x] += out.g_levels[k - 1][x];
    }

    out.lip_bound =
        3.0 * (L + alpha + (a2L / (1.0 - a2L)) * (1.0 + std::ldexp(alpha, -6)));
    out.lower_bound = (delta0 - a2L / (1.0 - a2L) - alpha) - sched.tail(depth);

    // Pair difference of a residue-class sum, deepest (smallest) level first.
    auto class_diff = [&](std::size_t j, Index x, Index y) {
        double acc = 0.0;
        for (std::size_t k = depth; k >= 1; --k) {
            if (k % M != j) continue;
            acc += out.g_levels[k - 1][x] - out.g_levels[k - 1][y];
        }
        return acc;
    };

    std::vector<double> drow(space.size());
    double measured = 0.0;
    for (Index x = 0; x < space.size(); ++x) {
        space.dist_row(x, drow.data());
        for (Index y = x + 1; y < space.size(); ++y) {
            if (drow[y] <= 0.0) continue;
            for (std::size_t j = 0; j < M; ++j) {
                const double q = std::fabs(class_diff(j, x, y)) / drow[y];
                if (q > measured) measured = q;
            }
        }
    }
    out.measured_lip = measured;
    if (measured > out.lip_bound + 1e-6)
        throw ValidationError("build_independent: Lipschitz bound violated");

    // Sampled lambda grid: every pattern with max |lambda_i| = 1, the other
    // components drawn from {-1, -1/2, 0, 1/2, 1}.
    const double grid_vals[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
    std::vector<std::vector<double>> patterns;
    {
        std::vector<std::size_t> digits(M, 0);
        while (true) {
            std::vector<double> lam(M);
            double maxabs = 0.0;
            for (std::size_t j = 0; j < M; ++j) {
                lam[j] = grid_vals[digits[j]];
                maxabs = std::max(maxabs, std::fabs(lam[j]));
            }
            if (maxabs == 1.0) patterns.push_back(lam);
            std::size_t j = 0;
            while (j < M && ++digits[j] == 5) digits[j++] = 0;
            if (j == M) break;
        }
    }

    // Top level of each residue class; the lower bound is certified at that
    // level's witness window.
    std::vector<std::size_t> top_level(M, 0);
    for (std::size_t k = 1; k <= depth; ++k) top_level[k % M] = k;

    double min_var = std::numeric_limits<double>::infinity();
    for (Index x : out.S_prime) {
        space.dist_row(x, drow.data());
        for (const auto& lam : patterns) {
            std::size_t jstar = 0;
            for (std::size_t j = 0; j < M; ++j)
                if (std::fabs(lam[j]) == 1.0) jstar = j;
            const double window = sched.inv_m[top_level[jstar] - 1];
            double var = 0.0;
            for (Index y = 0; y < space.size(); ++y) {
                const double d = drow[y];
                if (d <= 0.0 || d > window) continue;
                double diff = 0.0;
                for (std::size_t j = 0; j < M; ++j)
                    if (lam[j] != 0.0) diff += lam[j] * class_diff(j, x, y);
                var = std::max(var, std::fabs(diff) / d);
            }
            min_var = std::min(min_var, var);
        }
    }
    out.min_variation = std::isfinite(min_var) ? min_var : 0.0;
    if (!out.S_prime.empty() && out.min_variation < out.lower_bound - tol)
        throw ValidationError("build_independent: lower variation bound violated");

    return out;
}

ViolationReport liplip_violation_report(const FiniteMetricSpace& space,
                                        const std::vector<Index>& S_prime,
                                        const std::vector<std::vector<double>>& g_levels,
                                        const Schedule& schedule, double delta0,
                                        double tol) {
    ViolationReport rep;
    const std::size_t depth = schedule.inv_m.size();
    if (depth == 0 || g_levels.size() != depth)
        throw InputError("violation report: schedule/levels mismatch");
    const double alpha = schedule.alpha;
    const double a2L = alpha * alpha / schedule.L;
    const double window_bound =
        alpha + (a2L / (1.0 - a2L)) * (1.0 + std::ldexp(alpha, -6));
    const double fine_window = schedule.inv_m.back();
    const double lower =
        (delta0 - a2L / (1.0 - a2L) - alpha) - schedule.tail(depth);

    // phi = sum of all g_k; differences taken deepest level first.
    auto phi_diff = [&](Index x, Index y) {
        double acc = 0.0;
        for (std::size_t k = depth; k >= 1; --k)
            acc += g_levels[k - 1][x] - g_levels[k - 1][y];
        return acc;
    };

    std::vector<double> drow(space.size());
    rep.all_violate = !S_prime.empty();
    for (Index x : S_prime) {
        space.dist_row(x, drow.data());
        ViolationRow row;
        row.point = x;
        row.window_bound = window_bound;
        for (Index y = 0; y < space.size(); ++y) {
            const double d = drow[y];
            if (d <= 0.0 || d > fine_window) continue;
            row.biglip_fine = std::max(row.biglip_fine, std::fabs(phi_diff(x, y)) / d);
        }
        for (std::size_t s = 0; s < depth; ++s) {
            const double r = schedule.rho[s];
            double best = 0.0;
            for (Index y = 0; y < space.size(); ++y) {
                if (drow[y] <= 0.0 || drow[y] > r) continue;
                best = std::max(best, std::fabs(phi_diff(x, y)) / r);
            }
            row.varlip_capped = std::max(row.varlip_capped, best);
            if (best > window_bound + tol) rep.all_violate = false;
        }
        row.ratio = row.biglip_fine / window_bound;
        if (row.biglip_fine < lower - tol || row.ratio <= 1.0)
            rep.all_violate = false;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace lipgeo
