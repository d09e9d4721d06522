#include "lipgeo/lipscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lipgeo/alberti.hpp"
#include "lipgeo/kernels.hpp"

namespace lipgeo {

LipProfile lip_profile(const FiniteMetricSpace& space,
                       const std::vector<double>& f_values,
                       const std::vector<double>& scales) {
    if (scales.empty()) throw InputError("lip_profile: empty scale grid");
    for (double r : scales)
        if (!(r > 0.0)) throw InputError("lip_profile: scales must be positive");

    LipProfile prof;
    prof.scales = scales;
    std::sort(prof.scales.begin(), prof.scales.end());
    prof.n_points = space.size();
    const std::size_t R = prof.scales.size();
    prof.biglip.assign(space.size() * R, 0.0);
    prof.smllip.assign(space.size() * R, 0.0);

    std::vector<double> drow(space.size());
    std::vector<std::pair<double, double>> by_dist;  // (distance, |df|)
    for (Index x = 0; x < space.size(); ++x) {
        space.dist_row(x, drow.data());
        // biglip: max quotient within each window.
        for (std::size_t s = 0; s < R; ++s) {
            prof.biglip[x * R + s] = kernels::max_quotient(
                f_values[x], f_values.data(), drow.data(), 0.0, prof.scales[s],
                space.size());
        }
        // smllip: realized scales ascending; variation(s) = prefix max of
        // |df| over d <= s, divided by s; smllip_at(r) = min over s <= r.
        by_dist.clear();
        for (Index y = 0; y < space.size(); ++y)
            if (drow[y] > 0.0)
                by_dist.emplace_back(drow[y], std::fabs(f_values[x] - f_values[y]));
        std::sort(by_dist.begin(), by_dist.end());
        double prefmax = 0.0;
        double running_min = std::numeric_limits<double>::infinity();
        std::size_t s_idx = 0;
        for (std::size_t k = 0; k < by_dist.size() && s_idx < R; ++k) {
            prefmax = std::max(prefmax, by_dist[k].second);
            // A realized scale ends where the distance changes.
            if (k + 1 < by_dist.size() && by_dist[k + 1].first == by_dist[k].first)
                continue;
            const double s = by_dist[k].first;
            while (s_idx < R && prof.scales[s_idx] < s) {
                prof.smllip[x * R + s_idx] =
                    std::isfinite(running_min) ? running_min : 0.0;
                ++s_idx;
            }
            running_min = std::min(running_min, prefmax / s);
        }
        for (; s_idx < R; ++s_idx)
            prof.smllip[x * R + s_idx] =
                std::isfinite(running_min) ? running_min : 0.0;
    }
    return prof;
}

LipLipReport liplip_check(const FiniteMetricSpace& space,
                          const std::vector<double>& f_values,
                          const std::vector<double>& scales, double tol,
                          double keith_tau) {
    const auto prof = lip_profile(space, f_values, scales);
    LipLipReport rep;
    rep.ratio.assign(space.size(), 1.0);
    for (Index x = 0; x < space.size(); ++x) {
        const double big = prof.biglip_fine(x);
        const double sml = prof.smllip_fine(x);
        if (big == 0.0) {
            rep.ratio[x] = 1.0;  // vacuous
            continue;
        }
        rep.ratio[x] = sml > 0.0 ? big / sml : std::numeric_limits<double>::infinity();
        if (rep.ratio[x] > 1.0 + tol) rep.flagged.push_back(x);
        if (keith_tau * sml < big - tol) rep.keith_failing.push_back(x);
    }
    return rep;
}

PorosityScan porosity_scan(const FiniteMetricSpace& space,
                           const std::vector<Index>& Y,
                           const std::vector<double>& scales) {
    PorosityScan scan;
    scan.scales = scales;
    std::vector<bool> in_Y(space.size(), false);
    for (Index y : Y) in_Y[y] = true;

    // dist(x, Y) for every point.
    std::vector<double> dist_to_Y(space.size(), std::numeric_limits<double>::infinity());
    std::vector<double> drow(space.size());
    for (Index y : Y) {
        space.dist_row(y, drow.data());
        for (Index x = 0; x < space.size(); ++x)
            dist_to_Y[x] = std::min(dist_to_Y[x], drow[x]);
    }

    for (double r : scales) {
        std::vector<PorosityWitness> row;
        double certified = std::numeric_limits<double>::infinity();
        for (Index y : Y) {
            space.dist_row(y, drow.data());
            PorosityWitness best;
            best.center = y;
            for (Index cand = 0; cand < space.size(); ++cand) {
                const double d = drow[cand];
                if (d <= r / 4.0 || d > r) continue;
                if (dist_to_Y[cand] <= 0.0) continue;
                const double cprime = dist_to_Y[cand] / d;
                if (cprime > best.constant) {
                    best.constant = cprime;
                    best.witness = cand;
                    best.scale = d;
                }
            }
            certified = std::min(certified, best.constant);
            row.push_back(best);
        }
        scan.per_scale.push_back(std::move(row));
        scan.certified.push_back(std::isfinite(certified) ? certified : 0.0);
    }
    return scan;
}

SaturateResult porosity_saturate(const FiniteMetricSpace& ambient,
                                 const std::vector<Index>& K, double c,
                                 const std::vector<double>& scales, double tol) {
    if (K.empty()) throw InputError("porosity_saturate: empty K");
    // Certify the hypothesis first.
    const auto pre = porosity_scan(ambient, K, scales);
    for (std::size_t s = 0; s < scales.size(); ++s) {
        if (pre.certified[s] < c)
            throw InputError("porosity_saturate: c not certified at scale " +
                             std::to_string(scales[s]));
    }

    std::vector<bool> keep(ambient.size(), false);
    for (Index k : K) keep[k] = true;

    std::vector<double> drow(ambient.size());
    std::vector<double> dist_to_K(ambient.size(), std::numeric_limits<double>::infinity());
    for (Index k : K) {
        ambient.dist_row(k, drow.data());
        for (Index x = 0; x < ambient.size(); ++x)
            dist_to_K[x] = std::min(dist_to_K[x], drow[x]);
    }

    // Per audited scale: W_c-witness distances psi(x), r_m = min over K,
    // an (r_m / 3)-net of K, and one witness per net point with
    // d(x, w) > 2 r_m / 3. The construction runs at 2/3 of the audited
    // scale so that the (3/2)-factor in d(x', w) <= (3/2) d(x, w) keeps the
    // transported witness inside the audited window.
    for (double scale : scales) {
        const double cscale = 2.0 * scale / 3.0;
        std::vector<double> psi;
        psi.reserve(K.size());
        for (Index k : K) {
            ambient.dist_row(k, drow.data());
            double best = 0.0;
            for (Index cand = 0; cand < ambient.size(); ++cand) {
                const double d = drow[cand];
                if (d <= 0.0 || d > cscale) continue;
                if (c * d < dist_to_K[cand]) best = std::max(best, d);
            }
            if (best == 0.0)
                throw InputError("porosity_saturate: no witness at scale " +
                                 std::to_string(scale));
            psi.push_back(best);
        }
        const double r_m = *std::min_element(psi.begin(), psi.end());

        // Greedy (r_m / 3)-net of K in ascending K order.
        std::vector<Index> net;
        for (Index k : K) {
            bool far = true;
            for (Index m : net)
                if (ambient.dist(k, m) < r_m / 3.0) {
                    far = false;
                    break;
                }
            if (far) net.push_back(k);
        }
        for (Index x : net) {
            ambient.dist_row(x, drow.data());
            Index chosen = SIZE_MAX;
            double chosen_d = 0.0;
            for (Index cand = 0; cand < ambient.size(); ++cand) {
                const double d = drow[cand];
                if (d <= 0.0 || d > cscale) continue;
                if (c * d < dist_to_K[cand] && d > 2.0 * r_m / 3.0 && d > chosen_d) {
                    chosen = cand;
                    chosen_d = d;
                }
            }
            if (chosen == SIZE_MAX)
                throw InternalError("porosity_saturate: net point lost its witness");
            keep[chosen] = true;
        }
    }

    SaturateResult out;
    for (Index x = 0; x < ambient.size(); ++x)
        if (keep[x]) out.points.push_back(x);

    // Re-certify 2c/3 - tol inside the saturated space.
    auto restricted = restrict(ambient, out.points);
    std::vector<Index> K_new;
    std::vector<bool> is_K(ambient.size(), false);
    for (Index k : K) is_K[k] = true;
    for (std::size_t i = 0; i < out.points.size(); ++i)
        if (is_K[out.points[i]]) K_new.push_back(i);
    out.K_in_output = K_new;
    out.recertified = porosity_scan(restricted.space, K_new, scales);
    for (std::size_t s = 0; s < scales.size(); ++s) {
        if (out.recertified.certified[s] < 2.0 * c / 3.0 - tol)
            throw ValidationError("porosity_saturate: recertification failed at scale " +
                                  std::to_string(scales[s]));
    }
    return out;
}

GapVerdict gap_detect(const FiniteMetricSpace& space, const std::vector<Index>& S,
                      const std::vector<double>& f_values, double alpha,
                      double beta, const std::vector<Fragment>& pool,
                      const std::vector<double>& scales, double tol) {
    if (!(alpha > beta)) throw InputError("gap_detect: need alpha > beta");
    GapVerdict verdict;
    verdict.label = "pool-relative verdict for the supplied measure only";
    const auto est = weaver_norm_estimate(space, pool, f_values);
    const auto prof = lip_profile(space, f_values, scales);
    verdict.min_biglip_on_S = std::numeric_limits<double>::infinity();
    for (Index s : S) {
        verdict.max_estimate_on_S = std::max(verdict.max_estimate_on_S, est[s]);
        if (est[s] > beta + tol) verdict.failing_estimate.push_back(s);
        // biglip over the whole audited range: the profile maximum.
        double big = 0.0;
        for (std::size_t r = 0; r < prof.scales.size(); ++r)
            big = std::max(big, prof.biglip_at(s, r));
        verdict.min_biglip_on_S = std::min(verdict.min_biglip_on_S, big);
        if (big < alpha - tol) verdict.failing_biglip.push_back(s);
    }
    verdict.gap_candidate =
        verdict.failing_estimate.empty() && verdict.failing_biglip.empty();
    return verdict;
}

}  // namespace lipgeo
