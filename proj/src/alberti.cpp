#include "lipgeo/alberti.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lipgeo/poset.hpp"

namespace lipgeo {

void AlbertiRep::validate_shape(const FiniteMetricSpace& space) const {
    if (fragments.size() != probs.size() || fragments.size() != densities.size())
        throw InputError("rep: fragments/probs/densities sizes differ");
    double psum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw InputError("rep: negative probability");
        psum += p;
    }
    if (!fragments.empty() && std::fabs(psum - 1.0) > 1e-12)
        throw InputError("rep: probabilities must sum to 1");
    for (std::size_t j = 0; j < fragments.size(); ++j) {
        fragments[j].validate(space);
        if (densities[j].size() != fragments[j].size())
            throw InputError("rep: density not supported exactly on the trace");
        for (double d : densities[j])
            if (!(d >= 0.0)) throw InputError("rep: negative density");
    }
}

ResidualReport validate_rep(const FiniteMetricSpace& space, const AlbertiRep& rep,
                            double tol, const std::vector<double>* measure) {
    rep.validate_shape(space);
    const std::vector<double>& mu = measure ? *measure : space.weights();
    ResidualReport rr;
    std::vector<double> acc(space.size(), 0.0);
    for (std::size_t j = 0; j < rep.size(); ++j) {
        const auto& frag = rep.fragments[j];
        for (std::size_t i = 0; i < frag.size(); ++i)
            acc[frag.trace[i]] += rep.probs[j] * rep.densities[j][i];
    }
    rr.residual.resize(space.size());
    for (Index x = 0; x < space.size(); ++x) {
        rr.residual[x] = std::fabs(mu[x] - acc[x]);
        rr.max_residual = std::max(rr.max_residual, rr.residual[x]);
        rr.total_residual += rr.residual[x];
    }
    rr.pass = rr.max_residual <= tol;
    return rr;
}

namespace {

double fragment_upper_lip(const FiniteMetricSpace& space, const Fragment& frag) {
    if (frag.size() < 2) return 0.0;
    return bilipschitz_constants(frag, space).upper;
}

double sample_lip(const FiniteMetricSpace& space, const std::vector<double>& f,
                  std::size_t q) {
    double lip = 0.0;
    for (Index i = 0; i < space.size(); ++i) {
        for (Index j = i + 1; j < space.size(); ++j) {
            const double d = space.dist(i, j);
            if (d <= 0.0) continue;
            double acc = 0.0;
            for (std::size_t k = 0; k < q; ++k) {
                const double diff = f[i * q + k] - f[j * q + k];
                acc += diff * diff;
            }
            lip = std::max(lip, std::sqrt(acc) / d);
        }
    }
    return lip;
}

}  // namespace

DerivationField derivation_apply(const FiniteMetricSpace& space,
                                 const AlbertiRep& rep,
                                 const std::vector<double>& f_values, std::size_t q,
                                 const std::vector<double>* g_weights,
                                 const std::vector<double>* measure) {
    rep.validate_shape(space);
    if (f_values.size() != space.size() * q)
        throw InputError("derivation_apply: f must have q values per point");
    const std::vector<double>& mu = measure ? *measure : space.weights();

    DerivationField out;
    out.values.assign(space.size() * q, 0.0);
    out.defined.assign(space.size(), false);
    std::vector<double> num(space.size() * q, 0.0);
    std::vector<double> mass_seen(space.size(), 0.0);

    double pairing = 0.0;
    for (std::size_t j = 0; j < rep.size(); ++j) {
        const Fragment& frag = rep.fragments[j];
        if (frag.size() < 2) {
            // Isolated point: no derivative, contributes nothing.
            continue;
        }
        const auto df = directional_derivative(frag, f_values, q);
        for (std::size_t i = 0; i < frag.size(); ++i) {
            const Index x = frag.trace[i];
            const double w = rep.probs[j] * rep.densities[j][i];
            for (std::size_t k = 0; k < q; ++k) num[x * q + k] += w * df[i * q + k];
            mass_seen[x] += w;
            if (g_weights) pairing += w * df[i * q] * (*g_weights)[x];
        }
    }
    if (!g_weights) {
        // Pairing against g = 1 by default.
        for (Index x = 0; x < space.size(); ++x) pairing += num[x];
    }
    out.pairing = pairing;

    for (Index x = 0; x < space.size(); ++x) {
        if (mu[x] > 0.0) {
            out.defined[x] = true;
            for (std::size_t k = 0; k < q; ++k)
                out.values[x * q + k] = num[x * q + k] / mu[x];
        } else if (mass_seen[x] > 0.0) {
            out.excluded.push_back(x);
        }
    }

    double C = 0.0;
    for (const auto& frag : rep.fragments)
        C = std::max(C, fragment_upper_lip(space, frag));
    out.norm_bound = C;
    double g_l1 = 0.0;
    for (Index x = 0; x < space.size(); ++x)
        g_l1 += std::fabs(g_weights ? (*g_weights)[x] : 1.0) * mu[x];
    out.pairing_bound = C * sample_lip(space, f_values, q) * g_l1;
    return out;
}

EffectiveSpeed effective_speed(const FiniteMetricSpace& space, const AlbertiRep& rep,
                               const std::vector<double>* measure) {
    rep.validate_shape(space);
    const std::vector<double>& mu = measure ? *measure : space.weights();
    EffectiveSpeed out;
    out.sigma.assign(space.size(), 0.0);
    out.defined.assign(space.size(), false);
    std::vector<double> num(space.size(), 0.0);
    for (std::size_t j = 0; j < rep.size(); ++j) {
        const Fragment& frag = rep.fragments[j];
        if (frag.size() < 2) continue;
        const auto md = metric_differential(frag, space);
        for (std::size_t i = 0; i < frag.size(); ++i)
            num[frag.trace[i]] += rep.probs[j] * rep.densities[j][i] * md[i];
    }
    for (Index x = 0; x < space.size(); ++x) {
        if (mu[x] > 0.0) {
            out.defined[x] = true;
            out.sigma[x] = num[x] / mu[x];
        }
    }
    return out;
}

ConeCheckReport check_directional_cone(const FiniteMetricSpace& space,
                                       const AlbertiRep& rep,
                                       const std::vector<double>& f_values,
                                       std::size_t q, const ConeField& cones,
                                       double tol) {
    ConeCheckReport rep_out;
    rep_out.all_fragments_certify = true;
    const std::vector<double> zeros(space.size(), 0.0);
    for (const auto& frag : rep.fragments) {
        const auto dsr =
            check_direction_speed(frag, space, f_values, q, cones, 0.0, zeros, tol);
        if (dsr.direction_fraction < 1.0) rep_out.all_fragments_certify = false;
    }
    std::vector<bool> visited(space.size(), false);
    for (std::size_t j = 0; j < rep.size(); ++j)
        for (std::size_t i = 0; i < rep.fragments[j].size(); ++i)
            if (rep.probs[j] * rep.densities[j][i] > 0.0)
                visited[rep.fragments[j].trace[i]] = true;

    const auto D = derivation_apply(space, rep, f_values, q);
    std::vector<double> u(q);
    for (Index x = 0; x < space.size(); ++x) {
        if (!D.defined[x] || !visited[x]) continue;
        for (std::size_t k = 0; k < q; ++k) u[k] = D.values[x * q + k];
        ConeSpec closed = cones.at(x);
        closed.open = false;
        if (!cone_contains(closed, u, tol)) rep_out.failing_points.push_back(x);
    }
    rep_out.pass = rep_out.failing_points.empty();
    return rep_out;
}

SpeedCheckReport check_speed_bound(const FiniteMetricSpace& space,
                                   const AlbertiRep& rep,
                                   const std::vector<double>& f_values,
                                   double delta, double tol) {
    SpeedCheckReport out;
    out.all_fragments_certify = true;
    for (const auto& frag : rep.fragments) {
        if (frag.size() < 2) continue;
        const auto md = metric_differential(frag, space);
        const auto df = directional_derivative(frag, f_values, 1);
        for (std::size_t i = 0; i < frag.size(); ++i)
            if (df[i] < delta * md[i] - tol) out.all_fragments_certify = false;
    }
    const auto D = derivation_apply(space, rep, f_values, 1);
    const auto sp = effective_speed(space, rep);
    for (Index x = 0; x < space.size(); ++x) {
        if (!D.defined[x] || sp.sigma[x] == 0.0) continue;
        if (D.values[x] < delta * sp.sigma[x] - tol) out.failing_points.push_back(x);
    }
    out.pass = out.failing_points.empty();
    return out;
}

AlbertiRep reparametrize(const AlbertiRep& rep, double a, double b) {
    if (a == 0.0) throw InputError("reparametrize: a must be nonzero");
    AlbertiRep out = rep;
    for (auto& frag : out.fragments) {
        for (double& t : frag.domain) t = (t - b) / a;
        if (a < 0.0) {
            std::reverse(frag.domain.begin(), frag.domain.end());
            std::reverse(frag.trace.begin(), frag.trace.end());
        }
    }
    if (a < 0.0)
        for (auto& dens : out.densities) std::reverse(dens.begin(), dens.end());
    return out;
}

AlbertiRep restrict_rep(const AlbertiRep& rep, const std::vector<bool>& in_subset) {
    AlbertiRep out = rep;
    for (std::size_t j = 0; j < out.size(); ++j)
        for (std::size_t i = 0; i < out.fragments[j].size(); ++i)
            if (!in_subset[out.fragments[j].trace[i]]) out.densities[j][i] = 0.0;
    return out;
}

AlbertiRep glue_reps(const std::vector<AlbertiRep>& parts) {
    if (parts.empty()) throw InputError("glue_reps: no parts");
    const std::size_t K = parts.size();
    // Disjoint supports: a point may carry positive density in at most one part.
    std::vector<std::size_t> owner;
    for (std::size_t a = 0; a < K; ++a) {
        for (std::size_t j = 0; j < parts[a].size(); ++j) {
            for (std::size_t i = 0; i < parts[a].fragments[j].size(); ++i) {
                if (parts[a].densities[j][i] <= 0.0) continue;
                const Index x = parts[a].fragments[j].trace[i];
                if (owner.size() <= x) owner.resize(x + 1, SIZE_MAX);
                if (owner[x] != SIZE_MAX && owner[x] != a)
                    throw InputError("glue_reps: overlapping supports at point " +
                                     std::to_string(x));
                owner[x] = a;
            }
        }
    }
    const double norm = 1.0 - std::pow(2.0, -double(K));
    AlbertiRep out;
    for (std::size_t a = 0; a < K; ++a) {
        const double pw = std::pow(2.0, -double(a + 1)) / norm;
        const double dw = std::pow(2.0, double(a + 1)) * norm;
        for (std::size_t j = 0; j < parts[a].size(); ++j) {
            out.fragments.push_back(parts[a].fragments[j]);
            out.probs.push_back(pw * parts[a].probs[j]);
            auto dens = parts[a].densities[j];
            for (double& d : dens) d *= dw;
            out.densities.push_back(std::move(dens));
        }
    }
    return out;
}

namespace {

// Translate every fragment domain so it starts at `start`; derivative
// quotients are translation invariant.
void shift_domains(AlbertiRep& rep, double start) {
    for (auto& frag : rep.fragments) {
        const double offset = start - frag.domain.front();
        for (double& t : frag.domain) t += offset;
    }
}

double max_extent(const AlbertiRep& rep) {
    double e = 0.0;
    for (const auto& frag : rep.fragments) e = std::max(e, frag.extent());
    return e;
}

}  // namespace

AlbertiRep indicator_combine(const AlbertiRep& rep, const std::vector<bool>& in_U) {
    std::vector<bool> in_Uc(in_U.size());
    for (std::size_t i = 0; i < in_U.size(); ++i) in_Uc[i] = !in_U[i];

    // Window stride: the construction uses [0,1], [2,3], [4,5] when all
    // fragment extents fit in a unit window, and scales otherwise.
    const double window = std::max(1.0, max_extent(rep));

    AlbertiRep block1 = restrict_rep(rep, in_Uc);
    shift_domains(block1, 0.0);
    AlbertiRep block2 = reparametrize(restrict_rep(rep, in_Uc), -1.0, 0.0);
    shift_domains(block2, 2.0 * window);
    AlbertiRep block3 = restrict_rep(rep, in_U);
    shift_domains(block3, 4.0 * window);

    AlbertiRep out;
    auto push = [&out](const AlbertiRep& block, double pw) {
        for (std::size_t j = 0; j < block.size(); ++j) {
            out.fragments.push_back(block.fragments[j]);
            out.probs.push_back(pw * block.probs[j]);
            auto dens = block.densities[j];
            for (double& d : dens) d *= 2.0;
            out.densities.push_back(std::move(dens));
        }
    };
    push(block1, 0.25);
    push(block2, 0.25);
    push(block3, 0.50);
    return out;
}

AlbertiRep sum_reps(const std::vector<AlbertiRep>& reps) {
    if (reps.empty()) throw InputError("sum_reps: no representations");
    const std::size_t m = reps.size();
    double window = 1.0;
    for (const auto& r : reps) window = std::max(window, max_extent(r));

    AlbertiRep combined;
    for (std::size_t j = 0; j < m; ++j) {
        AlbertiRep part = reps[j];
        shift_domains(part, 2.0 * double(j) * window);
        for (std::size_t f = 0; f < part.size(); ++f) {
            combined.fragments.push_back(std::move(part.fragments[f]));
            combined.probs.push_back(part.probs[f] / double(m));
            combined.densities.push_back(std::move(part.densities[f]));
        }
    }
    // Final affine action by tau_{m,0} multiplies the derivation by m.
    return reparametrize(combined, double(m), 0.0);
}

AlbertiRep scale_rep(const AlbertiRep& rep, const std::vector<double>& lambda,
                     double bound, std::size_t depth) {
    if (!(bound > 0.0)) throw InputError("scale_rep: bound must be > 0");
    for (double l : lambda)
        if (!(l >= 0.0) || l >= bound)
            throw InputError("scale_rep: lambda must satisfy 0 <= lambda < bound");
    if (depth == 0) throw InputError("scale_rep: depth must be >= 1");

    // lambda_K = bound * sum_{n<=K} b_n 2^-n with b_n the n-th binary digit
    // of lambda/bound. Level n contributes (bound/2^n) chi_{U_n} D via an
    // indicator block scaled by reparametrization, summed with CL1.
    std::vector<AlbertiRep> levels;
    for (std::size_t nlev = 1; nlev <= depth; ++nlev) {
        std::vector<bool> U(lambda.size(), false);
        bool any = false;
        for (std::size_t x = 0; x < lambda.size(); ++x) {
            const double frac = lambda[x] / bound;
            const auto shifted = std::uint64_t(std::floor(frac * double(1ull << nlev)));
            U[x] = (shifted & 1ull) != 0;
            any = any || U[x];
        }
        AlbertiRep level = indicator_combine(rep, U);
        // tau_{c,0} with c = bound / 2^n scales D by c.
        level = reparametrize(level, bound / double(1ull << nlev), 0.0);
        levels.push_back(std::move(level));
        (void)any;
    }
    return sum_reps(levels);
}

GreedyBuildResult greedy_build_rep(const FiniteMetricSpace& space,
                                   const std::vector<double>& f_values,
                                   std::size_t q, const ConeSpec& cone,
                                   double delta, double coverage_target,
                                   double tol) {
    cone.validate();
    if (!(delta > 0.0)) throw InputError("greedy_build_rep: delta must be > 0");
    if (f_values.size() != space.size() * q)
        throw InputError("greedy_build_rep: f must have q values per point");

    GreedyBuildResult out;
    std::vector<double> remaining = space.weights();
    const double total = space.total_mass();
    double assigned = 0.0;

    std::vector<Fragment> fragments;
    std::vector<std::vector<double>> densities;

    while (total > 0.0 && assigned / total < coverage_target - 1e-15) {
        // Nodes: points with remaining mass, t = <w, f>, v = f - <w,f> w.
        std::vector<ChainNode> nodes;
        std::vector<Index> node_point;
        for (Index x = 0; x < space.size(); ++x) {
            if (remaining[x] <= 0.0) continue;
            ChainNode nd;
            nd.base = x;
            double inner = 0.0;
            for (std::size_t k = 0; k < q; ++k) inner += cone.axis[k] * f_values[x * q + k];
            nd.t = inner;
            if (q > 1) {
                nd.v.resize(q);
                for (std::size_t k = 0; k < q; ++k)
                    nd.v[k] = f_values[x * q + k] - inner * cone.axis[k];
            }
            nodes.push_back(std::move(nd));
            node_point.push_back(x);
        }
        if (nodes.empty()) break;
        ChainPoset poset(nodes, delta, cone.angle,
                         [&](Index a, Index b) { return space.dist(a, b); }, tol);
        const auto lc = longest_chain(poset);
        if (lc.length <= 1) break;

        // Distinct axial values are required for a fragment; drop chain
        // members that tie with their predecessor.
        std::vector<std::size_t> chain;
        for (std::size_t idx : lc.chain) {
            if (!chain.empty() && !(poset.node(idx).t > poset.node(chain.back()).t))
                continue;
            chain.push_back(idx);
        }
        if (chain.size() <= 1) break;
        Fragment frag = chain_to_fragment(poset, chain, space, tol);
        std::vector<double> dens(frag.size());
        for (std::size_t i = 0; i < frag.size(); ++i) {
            dens[i] = remaining[frag.trace[i]];
            assigned += dens[i];
            remaining[frag.trace[i]] = 0.0;
        }
        fragments.push_back(std::move(frag));
        densities.push_back(std::move(dens));
    }

    const std::size_t mfrag = fragments.size();
    out.rep.fragments = std::move(fragments);
    out.rep.densities = std::move(densities);
    if (mfrag > 0) {
        out.rep.probs.assign(mfrag, 1.0 / double(mfrag));
        for (auto& dens : out.rep.densities)
            for (double& d : dens) d *= double(mfrag);
    }
    for (Index x = 0; x < space.size(); ++x)
        if (remaining[x] > 0.0) out.uncovered.push_back(x);
    out.coverage = total > 0.0 ? assigned / total : 0.0;
    return out;
}

std::vector<double> weaver_norm_estimate(const FiniteMetricSpace& space,
                                         const std::vector<Fragment>& pool,
                                         const std::vector<double>& f_values) {
    std::vector<double> est(space.size(), 0.0);
    for (const auto& frag : pool) {
        if (frag.size() < 2) continue;
        const auto md = metric_differential(frag, space);
        const auto df = directional_derivative(frag, f_values, 1);
        for (std::size_t i = 0; i < frag.size(); ++i) {
            if (md[i] <= 0.0) continue;
            const double v = std::fabs(df[i]) / md[i];
            est[frag.trace[i]] = std::max(est[frag.trace[i]], v);
        }
    }
    return est;
}

AlbertiRep column_rep(const FiniteMetricSpace& grid, std::size_t side,
                      std::size_t dim, std::size_t axis) {
    if (axis >= dim) throw InputError("column_rep: axis out of range");
    std::size_t n = 1;
    for (std::size_t k = 0; k < dim; ++k) n *= side;
    if (grid.size() != n) throw InputError("column_rep: space is not the grid");
    std::size_t stride = 1;
    for (std::size_t k = 0; k < axis; ++k) stride *= side;

    const std::size_t n_cols = n / side;
    AlbertiRep rep;
    rep.probs.assign(n_cols, 1.0 / double(n_cols));
    // Columns enumerated by the remaining coordinates in ascending index.
    std::vector<bool> used(n, false);
    for (Index start = 0; start < n; ++start) {
        if (used[start]) continue;
        Fragment frag;
        std::vector<double> dens;
        for (std::size_t r = 0; r < side; ++r) {
            const Index x = start + r * stride;
            used[x] = true;
            frag.trace.push_back(x);
            frag.domain.push_back(grid.coord(x, axis));
            dens.push_back(double(n_cols) * grid.weight(x));
        }
        rep.fragments.push_back(std::move(frag));
        rep.densities.push_back(std::move(dens));
    }
    if (rep.fragments.size() != n_cols)
        throw InternalError("column_rep: column enumeration failed");
    return rep;
}

}  // namespace lipgeo
