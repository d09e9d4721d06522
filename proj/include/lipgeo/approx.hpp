#pragma once

#include <optional>
#include <vector>

#include "lipgeo/common.hpp"
#include "lipgeo/poset.hpp"
#include "lipgeo/space.hpp"

namespace lipgeo {

/// d_{delta,alpha} on base positions and the cylinder distance D:
///   d_da((z,v), (z',v')) = delta * d(z,z') + cot(alpha) * |v - v'|_2
///   D = max(|t - t'|, d_da).
/// With no transverse components (q = 1) the cot term is dropped.
struct StripMetric {
    double delta = 0.0;
    double alpha = 0.0;  // ignored when transverse_dim == 0
    std::size_t transverse_dim = 0;

    double cot_alpha() const;
    double base_dist(const FiniteMetricSpace& space, Index zi, const double* vi,
                     Index zj, const double* vj) const;
};

/// Cylinder sample: triples (z, v, t) over a base space. Base positions are
/// (z, v); the axial coordinate t lives in [0, height]. base is non-owning
/// and must outlive the cylinder.
struct Cylinder {
    const FiniteMetricSpace* base = nullptr;
    std::size_t transverse_dim = 0;
    std::vector<Index> z;       // base point per sample
    std::vector<double> v;      // row-major transverse coords
    std::vector<double> t;      // axial values
    double height = 0.0;

    std::size_t size() const { return z.size(); }
    const double* v_row(std::size_t i) const { return v.data() + i * transverse_dim; }
    /// max(base distance, transverse l2, |dt|).
    double dist(std::size_t i, std::size_t j) const;
};

/// Strip of width h above a 1-Lipschitz (w.r.t. d_da) base function, given by
/// its values on every base sample position.
struct Strip {
    std::vector<double> values;
    double width = 0.0;
    double scale = 1.0;  // lambda factor applied by disjointify
};

/// McShane extension f(x) = min_p (value[p] + d'(anchor[p], x)) over a
/// pseudometric d' given as a callable on indices in [0, n_points). The
/// anchor values must be 1-Lipschitz w.r.t. d' among themselves; throws
/// ValidationError naming the worst pair otherwise. The result is
/// 1-Lipschitz w.r.t. d' and agrees with the anchors on the anchor set.
std::vector<double> mcshane_extend(
    const std::vector<Index>& anchor_points,
    const std::vector<double>& anchor_values, std::size_t n_points,
    const std::function<double(Index, Index)>& dist, double tol = kDefaultTol);

/// Antichain (from mirsky_decompose with the same delta/alpha) to a strip:
/// graph values t over the antichain's base positions, then McShane-extended
/// to the whole base sample. Audits 1-Lipschitzness w.r.t. d_da.
Strip antichain_to_strip(const ChainPoset& poset,
                         const std::vector<std::size_t>& antichain,
                         const Cylinder& cyl, const StripMetric& metric,
                         double width, double tol = kDefaultTol);

/// Pointwise nondecreasing rearrangement (the min/max cascade collapses to
/// per-position order statistics); preserves the union of open strips at
/// every (y, t).
std::vector<Strip> sort_strips(std::vector<Strip> strips);

/// g_1 = f_1, g_j = max(g_{j-1} + lambda_{j-1} h, f_j); each lambda picked
/// from 64 equispaced candidates in (1, 3/2) minimising the sample mass on
/// the scaled strip's upper boundary (tie: smallest lambda).
struct DisjointifyResult {
    std::vector<Strip> strips;
    double boundary_mass = 0.0;   // mass sitting exactly on upper boundaries
    double uncovered_mass = 0.0;  // covered-before but not covered-after mass
};
/// sample_mass: mass charged to each cylinder sample (callers pass mu masked
/// to S, so boundary/uncovered masses are measured on S).
DisjointifyResult disjointify(const std::vector<Strip>& sorted, double width,
                              const Cylinder& cyl,
                              const std::vector<double>& sample_mass);

/// tau_n(z,v,t) = t - sum_j |(g_j(y), g_j(y)+lambda_j h) cap (0,t)| in closed
/// form. Throws if the strips overlap.
std::vector<double> tau_approximate(const Cylinder& cyl,
                                    const std::vector<Strip>& disjoint,
                                    double tol = kDefaultTol);

struct LocalLipEntry {
    Index point = 0;
    double radius = 0.0;
    double constant = 0.0;       // w.r.t. d_da within the same strip
    double constant_base = 0.0;  // w.r.t. the base metric d (= delta * constant scale)
};

struct ApproxCertificate {
    std::size_t M_n = 0;
    std::size_t n = 0;
    double width = 0.0;
    double sup_error = 0.0;
    double bound = 0.0;            // 3 (1 + delta + cot alpha) M(n) / n
    double global_lip_violation = 0.0;  // max |d tau| - D over all pairs
    double boundary_mass = 0.0;
    double uncovered_mass = 0.0;
    std::vector<LocalLipEntry> local_lip_report;
};

struct ApproxResult {
    std::vector<double> tau_n;  // per input point
    ApproxCertificate certificate;
    std::vector<Strip> strips;
    Cylinder cylinder;
};

/// Full pipeline of the one-dimensional approximation scheme: embed the data
/// into cylinder triples (z, pi_w^perp f, <w,f>), build the 1/n-net poset
/// near S, Mirsky-decompose, convert antichains to strips (width
/// 2(delta+cot alpha+1)/n), sort, disjointify and integrate tau_n.
/// f_values: per-point q-vector (row-major); w: unit vector in R^q.
ApproxResult onedim_approx(const FiniteMetricSpace& space,
                           const std::vector<Index>& S,
                           const std::vector<double>& f_values, std::size_t q,
                           const std::vector<double>& w, double delta,
                           double alpha, std::size_t n,
                           double tol = kDefaultTol);

}  // namespace lipgeo
