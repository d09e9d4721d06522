#pragma once

#include <optional>
#include <vector>

#include "lipgeo/common.hpp"
#include "lipgeo/fragment.hpp"
#include "lipgeo/space.hpp"

namespace lipgeo {

/// Discrete Alberti representation (P, nu): probability weights over
/// fragments and one nonnegative density value per trace point. Represents
/// mu when mu(x) = sum_j P_j nu_j(x) for every point x.
struct AlbertiRep {
    std::vector<Fragment> fragments;
    std::vector<double> probs;                   // sums to 1
    std::vector<std::vector<double>> densities;  // per fragment, per trace point

    std::size_t size() const { return fragments.size(); }
    void validate_shape(const FiniteMetricSpace& space) const;
};

struct ResidualReport {
    std::vector<double> residual;  // |mu(x) - sum_j P_j nu_j(x)| per point
    double max_residual = 0.0;
    double total_residual = 0.0;
    bool pass = false;
};

/// Checks mu = integral of nu dP pointwise. The measure defaults to the
/// space weights; pass `measure` to validate against a restriction.
ResidualReport validate_rep(const FiniteMetricSpace& space, const AlbertiRep& rep,
                            double tol = 1e-12,
                            const std::vector<double>* measure = nullptr);

/// Df and the norm data of the derivation induced by a representation.
struct DerivationField {
    std::vector<double> values;      // per point, q components (row-major)
    std::vector<bool> defined;       // false where mu = 0
    std::vector<Index> excluded;     // points with fragment mass but mu = 0
    double norm_bound = 0.0;         // C = max fragment Lipschitz constant
    double pairing = 0.0;            // integral of g * Df dmu (first component)
    double pairing_bound = 0.0;      // C * Lip(f) * |g|_1
};

/// Df(x) = [sum_j P_j (f o gamma_j)'(gamma_j^-1 x) nu_j(x)] / mu(x) on
/// mu > 0. Deterministic summation in fragment order.
DerivationField derivation_apply(const FiniteMetricSpace& space,
                                 const AlbertiRep& rep,
                                 const std::vector<double>& f_values,
                                 std::size_t q = 1,
                                 const std::vector<double>* g_weights = nullptr,
                                 const std::vector<double>* measure = nullptr);

/// sigma(x) = [sum_j P_j md_j(gamma_j^-1 x) nu_j(x)] / mu(x) on mu > 0.
struct EffectiveSpeed {
    std::vector<double> sigma;
    std::vector<bool> defined;
};
EffectiveSpeed effective_speed(const FiniteMetricSpace& space, const AlbertiRep& rep,
                               const std::vector<double>* measure = nullptr);

/// Per-point assertion Df(x) in cone(x) (closed, tol-relaxed) wherever every
/// fragment certifies direction at full arc fraction.
struct ConeCheckReport {
    bool all_fragments_certify = false;
    std::vector<Index> failing_points;
    bool pass = false;
};
ConeCheckReport check_directional_cone(const FiniteMetricSpace& space,
                                       const AlbertiRep& rep,
                                       const std::vector<double>& f_values,
                                       std::size_t q, const ConeField& cones,
                                       double tol = kDefaultTol);

/// Per-point assertion Df >= delta * sigma - tol wherever every fragment has
/// f-speed >= delta.
struct SpeedCheckReport {
    bool all_fragments_certify = false;
    std::vector<Index> failing_points;
    bool pass = false;
};
SpeedCheckReport check_speed_bound(const FiniteMetricSpace& space,
                                   const AlbertiRep& rep,
                                   const std::vector<double>& f_values,
                                   double delta, double tol = kDefaultTol);

/// Pullback along tau_{a,b}(x) = a x + b: domains mapped by the inverse
/// affine map (traces reversed for a < 0), probabilities and densities
/// unchanged. D_{tau* A} = a * D_A.
AlbertiRep reparametrize(const AlbertiRep& rep, double a, double b);

/// nu masked to the subset; validates against mu restricted to it.
AlbertiRep restrict_rep(const AlbertiRep& rep, const std::vector<bool>& in_subset);

/// Gluing of representations with pairwise disjoint supports:
/// P = sum 2^-a P_a / (1 - 2^-K), nu = 2^a (1 - 2^-K) nu_a on part a.
AlbertiRep glue_reps(const std::vector<AlbertiRep>& parts);

/// Three-block construction with weights (1/4, 1/4, 1/2) and doubled
/// densities; D of the result = chi_U * D of the input.
AlbertiRep indicator_combine(const AlbertiRep& rep, const std::vector<bool>& in_U);

/// CL1 sum: blocks shifted to windows [2(j-1)w, 2(j-1)w + w], P averaged,
/// then a final reparametrization by tau_{m,0}; D of the result = sum of Ds.
AlbertiRep sum_reps(const std::vector<AlbertiRep>& reps);

/// Dyadic scaling: D of the result = lambda_K * D where lambda_K is the
/// K-level dyadic floor of lambda (values in [0, bound)); the deviation from
/// lambda * Df is at most bound * 2^-K * |Df|.
AlbertiRep scale_rep(const AlbertiRep& rep, const std::vector<double>& lambda,
                     double bound, std::size_t depth);

/// Greedy operationalization of the chain criterion: repeatedly extract the
/// longest chain of the delta,alpha order over points with remaining mass,
/// convert it to a fragment carrying the remaining mass of its trace, stop at
/// the coverage target or when only singleton chains remain.
struct GreedyBuildResult {
    AlbertiRep rep;
    std::vector<Index> uncovered;  // points with leftover mass
    double coverage = 0.0;         // fraction of total mass assigned
};
GreedyBuildResult greedy_build_rep(const FiniteMetricSpace& space,
                                   const std::vector<double>& f_values,
                                   std::size_t q, const ConeSpec& cone,
                                   double delta, double coverage_target,
                                   double tol = kDefaultTol);

/// Pointwise certified lower envelope of the Weaver local norm:
/// sup over pool fragments through x of |<w-projection of (f o gamma)'>| /
/// md(t). Zero at points no pool fragment visits.
std::vector<double> weaver_norm_estimate(const FiniteMetricSpace& space,
                                         const std::vector<Fragment>& pool,
                                         const std::vector<double>& f_values);

/// The product-measure (Fubini) representation of a uniform grid: fragments
/// are the axis-aligned columns along `axis`, P uniform, densities
/// side * mu(x).
AlbertiRep column_rep(const FiniteMetricSpace& grid, std::size_t side,
                      std::size_t dim, std::size_t axis);

}  // namespace lipgeo
