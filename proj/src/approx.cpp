#include "lipgeo/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lipgeo/kernels.hpp"

namespace lipgeo {

double StripMetric::cot_alpha() const {
    return transverse_dim == 0 ? 0.0 : 1.0 / std::tan(alpha);
}

double StripMetric::base_dist(const FiniteMetricSpace& space, Index zi,
                              const double* vi, Index zj, const double* vj) const {
    double d = delta * space.dist(zi, zj);
    if (transverse_dim > 0) {
        double acc = 0.0;
        for (std::size_t k = 0; k < transverse_dim; ++k) {
            const double diff = vi[k] - vj[k];
            acc += diff * diff;
        }
        d += cot_alpha() * std::sqrt(acc);
    }
    return d;
}

double Cylinder::dist(std::size_t i, std::size_t j) const {
    double d = std::max(base->dist(z[i], z[j]), std::fabs(t[i] - t[j]));
    if (transverse_dim > 0) {
        double acc = 0.0;
        for (std::size_t k = 0; k < transverse_dim; ++k) {
            const double diff = v[i * transverse_dim + k] - v[j * transverse_dim + k];
            acc += diff * diff;
        }
        d = std::max(d, std::sqrt(acc));
    }
    return d;
}

std::vector<double> mcshane_extend(
    const std::vector<Index>& anchor_points,
    const std::vector<double>& anchor_values, std::size_t n_points,
    const std::function<double(Index, Index)>& dist, double tol) {
    const std::size_t m = anchor_points.size();
    if (m == 0) throw InputError("mcshane_extend: no anchors");
    if (anchor_values.size() != m)
        throw InputError("mcshane_extend: anchors/values mismatch");
    double worst = 0.0;
    std::pair<Index, Index> worst_pair{0, 0};
    double worst_gap = 0.0, worst_d = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            const double gap = std::fabs(anchor_values[a] - anchor_values[b]);
            const double d = dist(anchor_points[a], anchor_points[b]);
            if (gap - d > worst) {
                worst = gap - d;
                worst_pair = {anchor_points[a], anchor_points[b]};
                worst_gap = gap;
                worst_d = d;
            }
        }
    }
    if (worst > tol) {
        std::ostringstream os;
        os << "mcshane_extend: anchors not 1-Lipschitz, worst pair ("
           << worst_pair.first << ", " << worst_pair.second << "): |df| = "
           << worst_gap << " > d' = " << worst_d;
        throw ValidationError(os.str());
    }
    std::vector<double> vals(m), drow(m), out(n_points);
    for (std::size_t x = 0; x < n_points; ++x) {
        for (std::size_t a = 0; a < m; ++a) {
            vals[a] = anchor_values[a];
            drow[a] = dist(anchor_points[a], Index(x));
        }
        out[x] = kernels::min_plus(vals.data(), drow.data(), m);
    }
    return out;
}

Strip antichain_to_strip(const ChainPoset& poset,
                         const std::vector<std::size_t>& antichain,
                         const Cylinder& cyl, const StripMetric& metric,
                         double width, double tol) {
    if (antichain.empty()) throw InputError("antichain_to_strip: empty antichain");
    // Contract: no two antichain members are comparable.
    for (std::size_t i = 0; i < antichain.size(); ++i)
        for (std::size_t j = i + 1; j < antichain.size(); ++j)
            if (poset.comparable(antichain[i], antichain[j]))
                throw InputError("antichain_to_strip: comparable pair in antichain");

    const std::size_t n = cyl.size();
    Strip strip;
    strip.width = width;
    strip.values.assign(n, 0.0);

    // Graph values over the antichain's base positions, McShane-extended to
    // every base sample position w.r.t. d_da.
    std::vector<double> row(n);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    for (std::size_t a : antichain) {
        const ChainNode& nd = poset.node(a);
        for (std::size_t x = 0; x < n; ++x) {
            const double d = metric.base_dist(*cyl.base, nd.base, nd.v.data(),
                                              cyl.z[x], cyl.v_row(x));
            const double c = nd.t + d;
            if (c < best[x]) best[x] = c;
        }
    }
    strip.values = std::move(best);

    // 1-Lipschitz audit over anchor pairs (guaranteed by incomparability).
    for (std::size_t i = 0; i < antichain.size(); ++i) {
        for (std::size_t j = i + 1; j < antichain.size(); ++j) {
            const ChainNode& a = poset.node(antichain[i]);
            const ChainNode& b = poset.node(antichain[j]);
            const double d = metric.base_dist(*cyl.base, a.base, a.v.data(),
                                              b.base, b.v.data());
            if (std::fabs(a.t - b.t) > d + tol) {
                std::ostringstream os;
                os << "antichain_to_strip: graph not 1-Lipschitz at anchor pair ("
                   << antichain[i] << ", " << antichain[j] << ")";
                throw ValidationError(os.str());
            }
        }
    }
    return strip;
}

std::vector<Strip> sort_strips(std::vector<Strip> strips) {
    if (strips.size() < 2) return strips;
    const std::size_t n = strips.front().values.size();
    std::vector<double> column(strips.size());
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t s = 0; s < strips.size(); ++s) column[s] = strips[s].values[x];
        std::sort(column.begin(), column.end());
        for (std::size_t s = 0; s < strips.size(); ++s) strips[s].values[x] = column[s];
    }
    return strips;
}

DisjointifyResult disjointify(const std::vector<Strip>& sorted, double width,
                              const Cylinder& cyl,
                              const std::vector<double>& sample_mass) {
    DisjointifyResult out;
    if (sorted.empty()) return out;
    const std::size_t n = cyl.size();
    const double boundary_eps = 1e-12 * std::max(1.0, cyl.height);

    // Mass covered by the input (open, unscaled) strips.
    double covered_before = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        for (const Strip& s : sorted) {
            if (cyl.t[x] > s.values[x] && cyl.t[x] < s.values[x] + width) {
                covered_before += sample_mass[x];
                break;
            }
        }
    }

    out.strips = sorted;
    for (std::size_t j = 0; j < out.strips.size(); ++j) {
        Strip& g = out.strips[j];
        if (j > 0) {
            const Strip& prev = out.strips[j - 1];
            const double lift = prev.scale * width;
            for (std::size_t x = 0; x < n; ++x)
                g.values[x] = std::max(prev.values[x] + lift, g.values[x]);
        }
        // lambda from 64 equispaced candidates in (1, 3/2), minimising the
        // boundary atom mass, ties to the smallest.
        double best_lambda = 0.0, best_mass = std::numeric_limits<double>::infinity();
        for (int c = 1; c <= 64; ++c) {
            const double lambda = 1.0 + 0.5 * double(c) / 65.0;
            double mass = 0.0;
            for (std::size_t x = 0; x < n; ++x) {
                if (sample_mass[x] > 0.0 &&
                    std::fabs(cyl.t[x] - (g.values[x] + lambda * width)) <= boundary_eps)
                    mass += sample_mass[x];
            }
            if (mass < best_mass) {
                best_mass = mass;
                best_lambda = lambda;
            }
        }
        g.scale = best_lambda;
        out.boundary_mass += best_mass;
    }

    double covered_after = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        for (const Strip& g : out.strips) {
            if (cyl.t[x] > g.values[x] && cyl.t[x] < g.values[x] + g.scale * width) {
                covered_after += sample_mass[x];
                break;
            }
        }
    }
    out.uncovered_mass = std::max(0.0, covered_before - covered_after);
    return out;
}

std::vector<double> tau_approximate(const Cylinder& cyl,
                                    const std::vector<Strip>& disjoint,
                                    double tol) {
    const std::size_t n = cyl.size();
    // Strips must live inside the cylinder: a strip dipping below the
    // integration floor t = 0 gets clipped there, and two clipped strips can
    // vary in opposite directions, breaking the 1-Lipschitz property.
    for (const Strip& g : disjoint)
        for (std::size_t x = 0; x < n; ++x)
            if (g.values[x] < -tol)
                throw InputError("tau_approximate: strip below the cylinder base");
    // Disjointness check: per base position the scaled open intervals must
    // not intersect.
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t a = 0; a < disjoint.size(); ++a) {
            for (std::size_t b = a + 1; b < disjoint.size(); ++b) {
                const double lo_a = disjoint[a].values[x];
                const double hi_a = lo_a + disjoint[a].scale * disjoint[a].width;
                const double lo_b = disjoint[b].values[x];
                const double hi_b = lo_b + disjoint[b].scale * disjoint[b].width;
                if (std::max(lo_a, lo_b) < std::min(hi_a, hi_b) - tol)
                    throw InputError("tau_approximate: overlapping strips");
            }
        }
    }
    std::vector<double> tau(n);
    for (std::size_t x = 0; x < n; ++x) {
        const double t = cyl.t[x];
        double removed = 0.0;
        for (const Strip& g : disjoint) {
            const double lo = std::max(0.0, g.values[x]);
            const double hi = std::min(t, g.values[x] + g.scale * g.width);
            if (hi > lo) removed += hi - lo;
        }
        tau[x] = t - removed;
    }
    return tau;
}

namespace {

struct NetNodes {
    std::vector<ChainNode> nodes;
    std::vector<std::size_t> base_sample;  // cylinder sample index of each node's base
};

// 1/n-net over base positions times a 1/n axial grid, keeping nodes whose
// open 1/n-ball meets the embedded S sample.
NetNodes build_net_nodes(const Cylinder& cyl, const std::vector<Index>& S_samples,
                         std::size_t n) {
    const double eps = 1.0 / double(n);
    // Base net: greedy over sample base positions in ascending index, using
    // the cylinder base distance max(d(z,z'), |v - v'|).
    auto base_d = [&](std::size_t a, std::size_t b) {
        double d = cyl.base->dist(cyl.z[a], cyl.z[b]);
        for (std::size_t k = 0; k < cyl.transverse_dim; ++k) {
            const double diff = cyl.v[a * cyl.transverse_dim + k] -
                                cyl.v[b * cyl.transverse_dim + k];
            d = std::max(d, std::fabs(diff));
        }
        return d;
    };
    std::vector<std::size_t> base_net;
    for (std::size_t i = 0; i < cyl.size(); ++i) {
        bool far = true;
        for (std::size_t m : base_net) {
            if (base_d(i, m) < eps) {
                far = false;
                break;
            }
        }
        if (far) base_net.push_back(i);
    }
    std::vector<double> axial;
    const std::size_t axial_count =
        std::size_t(std::floor(cyl.height / eps + 1e-9)) + 1;
    for (std::size_t k = 0; k < axial_count; ++k) axial.push_back(double(k) * eps);

    NetNodes out;
    for (std::size_t b : base_net) {
        for (double tv : axial) {
            bool near = false;
            for (Index s : S_samples) {
                double d = std::max(base_d(b, s), std::fabs(tv - cyl.t[s]));
                if (d < eps) {
                    near = true;
                    break;
                }
            }
            if (!near) continue;
            ChainNode nd;
            nd.base = cyl.z[b];
            nd.v.assign(cyl.v_row(b), cyl.v_row(b) + cyl.transverse_dim);
            nd.t = tv;
            out.nodes.push_back(std::move(nd));
            out.base_sample.push_back(b);
        }
    }
    return out;
}

}  // namespace

ApproxResult onedim_approx(const FiniteMetricSpace& space,
                           const std::vector<Index>& S,
                           const std::vector<double>& f_values, std::size_t q,
                           const std::vector<double>& w, double delta,
                           double alpha, std::size_t n, double tol) {
    if (!(delta > 0.0)) throw InputError("onedim_approx: delta must be > 0");
    if (!(alpha > 0.0) || !(alpha < M_PI / 2.0))
        throw InputError("onedim_approx: alpha must lie in (0, pi/2)");
    if (n == 0) throw InputError("onedim_approx: n must be >= 1");
    if (q == 0 || w.size() != q)
        throw InputError("onedim_approx: w must have q components");
    if (f_values.size() != space.size() * q)
        throw InputError("onedim_approx: f must have q values per point");

    const std::size_t N = space.size();
    ApproxResult res;

    // Embed: t = <w, f>, v = f - <w,f> w (q-vector; q-1 intrinsic dims).
    Cylinder& cyl = res.cylinder;
    cyl.base = &space;
    cyl.transverse_dim = q > 1 ? q : 0;
    cyl.z.resize(N);
    cyl.t.resize(N);
    if (cyl.transverse_dim > 0) cyl.v.resize(N * q);
    double tmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) {
        cyl.z[i] = i;
        double inner = 0.0;
        for (std::size_t k = 0; k < q; ++k) inner += w[k] * f_values[i * q + k];
        cyl.t[i] = inner;
        if (cyl.transverse_dim > 0)
            for (std::size_t k = 0; k < q; ++k)
                cyl.v[i * q + k] = f_values[i * q + k] - inner * w[k];
        tmin = std::min(tmin, inner);
    }
    StripMetric metric{delta, alpha, cyl.transverse_dim};
    const double width = 2.0 * (delta + metric.cot_alpha() + 1.0) / double(n);

    // Axial values get a one-width margin above 0 so the half-width-lowered
    // strips cannot dip below the cylinder base (anchors near S then sit at
    // t > width - 1/n, and width/2 >= 1/n).
    const double t_offset = tmin - width;
    for (double& tv : cyl.t) tv -= t_offset;
    cyl.height = *std::max_element(cyl.t.begin(), cyl.t.end());

    ApproxCertificate& cert = res.certificate;
    cert.n = n;
    cert.width = width;

    std::vector<Strip> scaled;
    std::vector<int> strip_of_sample(N, -1);
    if (!S.empty()) {
        const auto netnodes = build_net_nodes(cyl, S, n);
        ChainPoset poset(netnodes.nodes, delta, alpha,
                         [&](Index a, Index b) { return space.dist(a, b); }, tol);
        const auto antichains = mirsky_decompose(poset);
        cert.M_n = antichains.size();

        std::vector<Strip> strips;
        for (const auto& ac : antichains) {
            Strip s = antichain_to_strip(poset, ac, cyl, metric, width, tol);
            // Center the strip on the graph: the net t-values sit mid-strip.
            for (double& gv : s.values) gv -= width / 2.0;
            strips.push_back(std::move(s));
        }
        strips = sort_strips(std::move(strips));

        std::vector<double> s_mass(N, 0.0);
        for (Index s : S) s_mass[s] = space.weight(s);
        auto dis = disjointify(strips, width, cyl, s_mass);
        cert.boundary_mass = dis.boundary_mass;
        cert.uncovered_mass = dis.uncovered_mass;
        scaled = std::move(dis.strips);
    }

    res.tau_n = tau_approximate(cyl, scaled, tol);

    // Global Lipschitz audit w.r.t. D over all sample pairs. The base
    // distance comes row-wise through the kernels; the transverse part is
    // folded in per pair. The outer loop splits across workers with an exact
    // max-reduction, so the result is independent of the worker count.
    {
        struct AuditCtx {
            const FiniteMetricSpace* space;
            const Cylinder* cyl;
            const std::vector<double>* tau;
            double delta, cot;
        } actx{&space, &cyl, &res.tau_n, delta, metric.cot_alpha()};

        auto chunk = [](std::size_t lo, std::size_t hi, void* raw) {
            const AuditCtx& a = *static_cast<AuditCtx*>(raw);
            const std::size_t n_pts = a.cyl->size();
            std::vector<double> drow(n_pts), cap(n_pts);
            double worst = -std::numeric_limits<double>::infinity();
            for (std::size_t i = lo; i < hi; ++i) {
                a.space->dist_row(a.cyl->z[i], drow.data());
                for (std::size_t j = 0; j < n_pts; ++j) {
                    double dda = a.delta * drow[j];
                    if (a.cyl->transverse_dim > 0) {
                        double acc = 0.0;
                        for (std::size_t k = 0; k < a.cyl->transverse_dim; ++k) {
                            const double diff =
                                a.cyl->v[i * a.cyl->transverse_dim + k] -
                                a.cyl->v[j * a.cyl->transverse_dim + k];
                            acc += diff * diff;
                        }
                        dda += a.cot * std::sqrt(acc);
                    }
                    cap[j] = std::max(std::fabs(a.cyl->t[i] - a.cyl->t[j]), dda);
                }
                cap[i] = std::numeric_limits<double>::infinity();
                const double v = kernels::max_lip_violation(
                    (*a.tau)[i], a.tau->data(), cap.data(), n_pts);
                if (v > worst) worst = v;
            }
            return worst;
        };
        cert.global_lip_violation =
            std::max(0.0, kernels::parallel_chunk_max(N, chunk, &actx));
    }

    // Sup error and its certified bound.
    double sup_err = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        sup_err = std::max(sup_err, std::fabs(cyl.t[i] - res.tau_n[i]));
    cert.sup_error = sup_err;
    cert.bound =
        3.0 * (1.0 + delta + metric.cot_alpha()) * double(cert.M_n) / double(n);

    // Local d_da audit at covered S points: pairs inside the same strip.
    for (std::size_t j = 0; j < scaled.size(); ++j) {
        for (std::size_t x = 0; x < N; ++x) {
            const Strip& g = scaled[j];
            if (cyl.t[x] > g.values[x] && cyl.t[x] < g.values[x] + g.scale * g.width)
                strip_of_sample[x] = int(j);
        }
    }
    for (Index s : S) {
        if (strip_of_sample[s] < 0) continue;
        LocalLipEntry e;
        e.point = s;
        for (Index s2 : S) {
            if (s2 == s || strip_of_sample[s2] != strip_of_sample[s]) continue;
            const double dda = metric.base_dist(space, cyl.z[s], cyl.v_row(s),
                                                cyl.z[s2], cyl.v_row(s2));
            const double dtau = std::fabs(res.tau_n[s] - res.tau_n[s2]);
            if (dda > 0.0) e.constant = std::max(e.constant, dtau / dda);
            const double db = space.dist(cyl.z[s], cyl.z[s2]);
            if (db > 0.0) e.constant_base = std::max(e.constant_base, dtau / db);
            e.radius = std::max(e.radius, std::max(dda, std::fabs(cyl.t[s] - cyl.t[s2])));
        }
        cert.local_lip_report.push_back(e);
    }

    // Report the approximant in the original units of <w, f> (the cylinder
    // axis was shifted; all audits are shift-invariant). With no strips the
    // approximant is <w, f> itself, bit for bit.
    if (scaled.empty()) {
        for (std::size_t i = 0; i < N; ++i) {
            double inner = 0.0;
            for (std::size_t k = 0; k < q; ++k) inner += w[k] * f_values[i * q + k];
            res.tau_n[i] = inner;
        }
    } else {
        for (double& tv : res.tau_n) tv += t_offset;
    }

    res.strips = std::move(scaled);
    return res;
}

}  // namespace lipgeo
