#pragma once

#include <vector>

#include "lipgeo/common.hpp"
#include "lipgeo/space.hpp"

namespace lipgeo {

/// Result of the truncation operator: g plus the subset S' where small-scale
/// variations of f are reproduced exactly.
struct TruncateResult {
    std::vector<double> g;
    std::vector<Index> S_prime;
    double offset = 0.0;        // sawtooth phase actually used
    double s_prime_mass = 0.0;  // mu(S') / mu(S)
};

/// g = min(sawtooth_{2h}(f + offset), clamp(2h - L dist(., S), 0, h)), offset
/// picked from ceil(4h/eps) equispaced phases maximising mu(S'). The four
/// contract properties are audited pairwise-exhaustively and a failure throws
/// ValidationError naming the violating pair:
///  (1) 0 <= g <= h,
///  (2) support inside B(S, 2h/L),
///  (3) |f(x)-f(y)| >= |g(x)-g(y)| for x, y in B(S, h/L),
///  (4) mu(S') >= (1 - 4 eps/h) mu(S), and |f(x)-f(y)| = |g(x)-g(y)|
///      whenever x in S' and d(x,y) <= eps/L.  g is L-Lipschitz.
TruncateResult truncate(const FiniteMetricSpace& space,
                        const std::vector<double>& f_values,
                        const std::vector<Index>& S, double h, double eps,
                        double L, double tol = kDefaultTol);

/// One certified family level: an L-Lipschitz function flat at radius rho
/// around S with a delta_0-variation witness within 1/m of every S point.
struct FlatLevel {
    double inv_m = 0.0;  // 1/m
    double rho = 0.0;    // certified flat radius, in (0, 1/m)
    std::vector<double> values;
};

class CantorFlatFamily {
public:
    /// Sample: level-`level` Cantor endpoints plus geometric penetration
    /// ladders inside every gap, held in split anchor+offset coordinates so
    /// ladder rungs far below one ulp of the anchors stay distinct. S is the
    /// set of gap endpoints (all level endpoints except 0 and 1, which are
    /// not adjacent to any gap and admit no delta_0-witness).
    CantorFlatFamily(std::size_t level, double delta0, double slope_budget,
                     double min_scale = 1e-45);

    const FiniteMetricSpace& space() const { return space_; }
    const std::vector<Index>& S() const { return S_; }
    double delta0() const { return delta0_; }
    double slope() const { return slope_; }

    /// Build and certify the level at a given 1/m; throws InputError
    /// ("resolution exhausted") when the sample cannot witness that scale.
    FlatLevel level_for(double inv_m) const;

private:
    void audit_level(const FlatLevel& lvl) const;

    FiniteMetricSpace space_;
    std::vector<Index> S_;
    double delta0_ = 0.0;
    double slope_ = 0.0;
    double min_scale_ = 0.0;
    std::vector<std::size_t> gap_of_point_;  // SIZE_MAX for endpoints
    std::vector<double> penetration_;
    std::vector<double> gap_length_;
};

/// The explicit parameter schedule of the construction.
struct Schedule {
    double alpha = 0.0;
    double L = 0.0;
    std::vector<double> inv_m;  // 1/m_k
    std::vector<double> h;      // h_k
    std::vector<double> eps;    // eps_k
    std::vector<double> rho;    // rho_{m_k}
    /// sum_{k > K} 2 h_k by the closed form
    /// (a^2/2)(1 + 2^{-(K+5)} r/(1-r)) rho_K, r = a^2/L.
    double tail(std::size_t K) const;
};

/// The independent functions are sums of per-level truncations whose scales
/// span dozens of orders of magnitude, so certificates are computed from the
/// level components (differences summed smallest level first); `psi` holds
/// the materialised sums for export and large-scale use.
struct IndependentResult {
    std::vector<std::vector<double>> g_levels;  // one array per level k=1..K
    std::size_t M = 0;                          // level k feeds psi_{k mod M}
    std::vector<std::vector<double>> psi;
    std::vector<Index> S_prime;
    Schedule schedule;
    double lip_bound = 0.0;     // 3 (L + a + (a^2/L)/(1-a^2/L)(1+2^-6 a))
    double lower_bound = 0.0;   // (d0 - (a^2/L)/(1-a^2/L) - a) - tail(K)
    double measured_lip = 0.0;  // max over psi_j of the sampled constant
    double min_variation = 0.0; // min over S' and the sampled lambda grid
    std::vector<double> per_level_s_prime_mass;
};

/// Builds the schedule (1/m_1 < a^2/(2^5 L), h_1 = a^2/4, eps_k = L/m_k,
/// 1/m_{k+1} < a^2 rho_{m_k}/(2^{k+5} L), h_{k+1} = (a^2/4) rho_{m_k}),
/// truncates each family level and certifies the Lipschitz and
/// lower-variation bounds on the sample. Requires
/// alpha < min(sqrt(delta0 L/(1+delta0))/2, delta0/2) and depth >= M.
IndependentResult build_independent(const CantorFlatFamily& family, std::size_t M,
                                    double alpha, double L, std::size_t depth,
                                    double tol = kDefaultTol);

struct ViolationRow {
    Index point = 0;
    double biglip_fine = 0.0;   // finest-window variation, >= lower bound
    double varlip_capped = 0.0; // max windowed variation over audited windows
    double window_bound = 0.0;  // alpha + (a^2/L)/(1-a^2/L)(1+2^-6 a)
    double ratio = 0.0;         // biglip_fine / window_bound
};

/// The closing remark's Lip-lip violation for phi = sum of all g_k: at every
/// S' point the finest-window biglip beats the windowed variation cap.
struct ViolationReport {
    std::vector<ViolationRow> rows;
    bool all_violate = false;
};
ViolationReport liplip_violation_report(const FiniteMetricSpace& space,
                                        const std::vector<Index>& S_prime,
                                        const std::vector<std::vector<double>>& g_levels,
                                        const Schedule& schedule, double delta0,
                                        double tol = kDefaultTol);

}  // namespace lipgeo
