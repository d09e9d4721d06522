#pragma once

#include <vector>

#include "lipgeo/common.hpp"
#include "lipgeo/space.hpp"

namespace lipgeo {

/// Discrete curve fragment: a strictly increasing parameter list mapped to
/// point indices of a space, gamma(t_i) = trace[i]. BiLipschitz on the
/// sample, hence injective.
struct Fragment {
    std::vector<double> domain;
    std::vector<Index> trace;

    std::size_t size() const { return domain.size(); }
    double extent() const { return domain.empty() ? 0.0 : domain.back() - domain.front(); }

    /// Checks domain monotonicity, matching lengths, and that distinct
    /// parameters map to distinct points (positive biLipschitz lower bound).
    void validate(const FiniteMetricSpace& space) const;
};

/// Cell mass Psi_gamma: half-gaps to the neighbouring parameters, full
/// half-gap at the ends. Total equals the domain extent.
std::vector<double> arc_weights(const Fragment& frag);

/// Metric differential md_gamma(t_i): mean of the available one-sided
/// quotients d(gamma(t_i), gamma(t_{i+-1})) / |t_i - t_{i+-1}|. Throws on a
/// single-point domain (the limit does not exist at isolated points).
std::vector<double> metric_differential(const Fragment& frag,
                                        const FiniteMetricSpace& space);

/// The one-sided mean is a convention at domain gaps; interior points whose
/// left and right metric quotients disagree by more than the threshold
/// (relative to the larger one) are flagged so reports can surface them.
std::vector<bool> quotient_asymmetry_flags(const Fragment& frag,
                                           const FiniteMetricSpace& space,
                                           double threshold = 0.1);

/// (f o gamma)' by the same one-sided-mean scheme, componentwise; values is
/// a per-point array over the whole space, q components each (row-major).
/// Exact on data affine in the parameter.
std::vector<double> directional_derivative(const Fragment& frag,
                                           const std::vector<double>& values,
                                           std::size_t q);

/// Pair (l, L): min and max over parameter pairs of d(gamma(t), gamma(s)) /
/// |t - s|.
struct BiLipschitzConstants {
    double lower = 0.0;
    double upper = 0.0;
};
BiLipschitzConstants bilipschitz_constants(const Fragment& frag,
                                           const FiniteMetricSpace& space);

/// Open cone C(w, alpha) = { u : tan(alpha) <w,u> > |pi_w^perp(u)| }.
/// Closed cones use >= instead. For q = 1 the transverse part vanishes and
/// membership reduces to the sign of <w,u>.
struct ConeSpec {
    std::vector<double> axis;  // unit vector in R^q
    double angle = 0.0;        // in (0, pi/2)
    bool open = true;

    void validate(double tol = kDefaultTol) const;
};

bool cone_contains(const ConeSpec& cone, const std::vector<double>& u,
                   double tol = kDefaultTol);

/// Piecewise-constant cone assignment; constant by default.
class ConeField {
public:
    explicit ConeField(ConeSpec constant) : constant_(std::move(constant)) {}
    ConeField(ConeSpec fallback, std::vector<std::pair<Index, ConeSpec>> overrides);
    const ConeSpec& at(Index point) const;

private:
    ConeSpec constant_;
    std::vector<std::pair<Index, ConeSpec>> overrides_;
};

/// Per-point audit of the direction and speed conditions along a fragment:
/// direction: (f o gamma)'(t_i) lies in the cone at gamma(t_i);
/// speed:     (g o gamma)'(t_i) >= delta * md(t_i) - tol.
struct DirectionSpeedReport {
    std::vector<bool> direction_ok;
    std::vector<bool> speed_ok;
    double direction_fraction = 0.0;  // ArcWeights mass fraction
    double speed_fraction = 0.0;
    double joint_fraction = 0.0;
};

DirectionSpeedReport check_direction_speed(const Fragment& frag,
                                           const FiniteMetricSpace& space,
                                           const std::vector<double>& f_values,
                                           std::size_t q, const ConeField& cones,
                                           double delta,
                                           const std::vector<double>& g_values,
                                           double tol = kDefaultTol);

}  // namespace lipgeo
