#pragma once

#include <vector>

#include "lipgeo/common.hpp"
#include "lipgeo/fragment.hpp"
#include "lipgeo/space.hpp"

namespace lipgeo {

/// Per-point variation profile over a scale grid:
///   biglip_at(x, r) = max over 0 < d(x,y) <= r of |f(x)-f(y)| / d(x,y)
///   smllip_at(x, r) = min over realized scales s <= r of
///                       max over 0 < d(x,y) <= s of |f(x)-f(y)| / s.
/// Finite-scale semantics: the summary values biglip/smllip are the profile
/// values at the finest audited scale (the continuum r -> 0 limit replaced
/// by the last audited window); the full profile is retained so trends stay
/// visible.
struct LipProfile {
    std::vector<double> scales;   // ascending
    std::vector<double> biglip;   // row-major [point][scale]
    std::vector<double> smllip;
    std::size_t n_points = 0;

    double biglip_at(Index x, std::size_t scale_idx) const {
        return biglip[x * scales.size() + scale_idx];
    }
    double smllip_at(Index x, std::size_t scale_idx) const {
        return smllip[x * scales.size() + scale_idx];
    }
    /// Summary at the finest audited scale.
    double biglip_fine(Index x) const { return biglip_at(x, 0); }
    double smllip_fine(Index x) const { return smllip_at(x, 0); }
};

LipProfile lip_profile(const FiniteMetricSpace& space,
                       const std::vector<double>& f_values,
                       const std::vector<double>& scales);

/// biglip / smllip ratio at the finest common window plus the Keith form
/// tau * smllip >= biglip.
struct LipLipReport {
    std::vector<double> ratio;        // per point; inf encoded as ratio > huge
    std::vector<Index> flagged;       // ratio > 1 + tol
    std::vector<Index> keith_failing; // tau * smllip < biglip - tol
};
LipLipReport liplip_check(const FiniteMetricSpace& space,
                          const std::vector<double>& f_values,
                          const std::vector<double>& scales, double tol,
                          double keith_tau = 1.0);

/// Porosity witness: y' with c * d(y', y) < dist(y', Y) strictly.
struct PorosityWitness {
    Index center = 0;
    Index witness = 0;
    double constant = 0.0;  // c' = dist(y', Y) / d(y', y)
    double scale = 0.0;     // d(y, y')
};

/// For each y in Y and each scale r in the grid, the best witness at that
/// scale (largest c'), if any. A witness "at scale r" lies in the annulus
/// (r/4, r]: the quarter floor keeps witnesses at the scale they certify
/// (arbitrarily close witnesses would certify every scale at once) while
/// leaving room for off-dyadic geometry.
struct PorosityScan {
    std::vector<double> scales;
    std::vector<std::vector<PorosityWitness>> per_scale;  // [scale][center]
    /// min over centers of the best constant at this scale (0 if some center
    /// has no witness).
    std::vector<double> certified;
};
PorosityScan porosity_scan(const FiniteMetricSpace& space,
                           const std::vector<Index>& Y,
                           const std::vector<double>& scales);

/// The completion construction: per audited scale, a finite net of K and one
/// witness per net point, united with K. The output re-certifies porosity
/// >= 2c/3 - tol at the audited scales.
struct SaturateResult {
    std::vector<Index> points;  // subset of the ambient: K plus witnesses
    std::vector<Index> K_in_output;
    PorosityScan recertified;
};
SaturateResult porosity_saturate(const FiniteMetricSpace& ambient,
                                 const std::vector<Index>& K, double c,
                                 const std::vector<double>& scales,
                                 double tol = 0.01);

/// Gap verdict: weaver_norm_estimate <= beta + tol on S (pool-relative) and
/// biglip >= alpha - tol on S.
struct GapVerdict {
    bool gap_candidate = false;
    double max_estimate_on_S = 0.0;
    double min_biglip_on_S = 0.0;
    std::vector<Index> failing_estimate;
    std::vector<Index> failing_biglip;
    std::string label;  // records pool-relativity
};
GapVerdict gap_detect(const FiniteMetricSpace& space, const std::vector<Index>& S,
                      const std::vector<double>& f_values, double alpha,
                      double beta, const std::vector<Fragment>& pool,
                      const std::vector<double>& scales,
                      double tol = kDefaultTol);

}  // namespace lipgeo
