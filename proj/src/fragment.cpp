#include "lipgeo/fragment.hpp"

#include <cmath>
#include <sstream>

namespace lipgeo {

void Fragment::validate(const FiniteMetricSpace& space) const {
    if (domain.size() != trace.size())
        throw InputError("fragment: domain and trace lengths differ");
    if (domain.empty()) throw InputError("fragment: empty domain");
    for (std::size_t i = 0; i + 1 < domain.size(); ++i) {
        if (!(domain[i] < domain[i + 1]))
            throw InputError("fragment: domain not strictly increasing at position " +
                             std::to_string(i));
    }
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace[i] >= space.size())
            throw InputError("fragment: trace index out of range at position " +
                             std::to_string(i));
    }
    for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
        if (space.dist(trace[i], trace[i + 1]) <= 0.0)
            throw InputError(
                "fragment: consecutive trace points coincide at position " +
                std::to_string(i));
    }
}

std::vector<double> arc_weights(const Fragment& frag) {
    const std::size_t n = frag.domain.size();
    std::vector<double> w(n, 0.0);
    if (n < 2) return w;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double half = (frag.domain[i + 1] - frag.domain[i]) / 2.0;
        w[i] += half;
        w[i + 1] += half;
    }
    return w;
}

namespace {

// Mean of the available one-sided quotients of `num` against the parameter
// gaps; one-sided at the ends.
std::vector<double> one_sided_mean(const std::vector<double>& t,
                                   const std::vector<double>& num_left,
                                   const std::vector<double>& num_right) {
    const std::size_t n = t.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        int sides = 0;
        if (i > 0) {
            acc += num_left[i] / (t[i] - t[i - 1]);
            ++sides;
        }
        if (i + 1 < n) {
            acc += num_right[i] / (t[i + 1] - t[i]);
            ++sides;
        }
        out[i] = acc / double(sides);
    }
    return out;
}

}  // namespace

std::vector<double> metric_differential(const Fragment& frag,
                                        const FiniteMetricSpace& space) {
    const std::size_t n = frag.size();
    if (n < 2)
        throw InputError("metric_differential: undefined on a single-point domain");
    std::vector<double> left(n, 0.0), right(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = space.dist(frag.trace[i], frag.trace[i + 1]);
        right[i] = d;
        left[i + 1] = d;
    }
    return one_sided_mean(frag.domain, left, right);
}

std::vector<bool> quotient_asymmetry_flags(const Fragment& frag,
                                           const FiniteMetricSpace& space,
                                           double threshold) {
    const std::size_t n = frag.size();
    std::vector<bool> flags(n, false);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double left = space.dist(frag.trace[i - 1], frag.trace[i]) /
                            (frag.domain[i] - frag.domain[i - 1]);
        const double right = space.dist(frag.trace[i], frag.trace[i + 1]) /
                             (frag.domain[i + 1] - frag.domain[i]);
        const double big = std::max(left, right);
        if (big > 0.0 && std::fabs(left - right) / big > threshold)
            flags[i] = true;
    }
    return flags;
}

std::vector<double> directional_derivative(const Fragment& frag,
                                           const std::vector<double>& values,
                                           std::size_t q) {
    const std::size_t n = frag.size();
    if (n < 2)
        throw InputError("directional_derivative: undefined on a single-point domain");
    std::vector<double> out(n * q);
    for (std::size_t c = 0; c < q; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            int sides = 0;
            if (i > 0) {
                acc += (values[frag.trace[i] * q + c] - values[frag.trace[i - 1] * q + c]) /
                       (frag.domain[i] - frag.domain[i - 1]);
                ++sides;
            }
            if (i + 1 < n) {
                acc += (values[frag.trace[i + 1] * q + c] - values[frag.trace[i] * q + c]) /
                       (frag.domain[i + 1] - frag.domain[i]);
                ++sides;
            }
            out[i * q + c] = acc / double(sides);
        }
    }
    return out;
}

BiLipschitzConstants bilipschitz_constants(const Fragment& frag,
                                           const FiniteMetricSpace& space) {
    const std::size_t n = frag.size();
    if (n < 2)
        throw InputError("bilipschitz_constants: undefined on a single-point domain");
    BiLipschitzConstants c;
    c.lower = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double quot = space.dist(frag.trace[i], frag.trace[j]) /
                                (frag.domain[j] - frag.domain[i]);
            if (quot < c.lower) c.lower = quot;
            if (quot > c.upper) c.upper = quot;
        }
    }
    return c;
}

void ConeSpec::validate(double tol) const {
    if (axis.empty()) throw InputError("cone: empty axis");
    double norm2 = 0.0;
    for (double w : axis) norm2 += w * w;
    if (std::fabs(std::sqrt(norm2) - 1.0) > std::max(tol, 1e-7))
        throw InputError("cone: axis must be a unit vector");
    if (!(angle > 0.0) || !(angle < M_PI / 2.0))
        throw InputError("cone: angle must lie strictly inside (0, pi/2)");
}

bool cone_contains(const ConeSpec& cone, const std::vector<double>& u, double tol) {
    const std::size_t q = cone.axis.size();
    if (u.size() != q) throw InputError("cone_contains: dimension mismatch");
    double inner = 0.0;
    for (std::size_t k = 0; k < q; ++k) inner += cone.axis[k] * u[k];
    double trans2 = 0.0;
    for (std::size_t k = 0; k < q; ++k) {
        const double t = u[k] - inner * cone.axis[k];
        trans2 += t * t;
    }
    const double lhs = std::tan(cone.angle) * inner;
    const double rhs = std::sqrt(trans2);
    return cone.open ? lhs > rhs + tol : lhs >= rhs - tol;
}

ConeField::ConeField(ConeSpec fallback, std::vector<std::pair<Index, ConeSpec>> overrides)
    : constant_(std::move(fallback)), overrides_(std::move(overrides)) {}

const ConeSpec& ConeField::at(Index point) const {
    for (const auto& [idx, cone] : overrides_)
        if (idx == point) return cone;
    return constant_;
}

DirectionSpeedReport check_direction_speed(const Fragment& frag,
                                           const FiniteMetricSpace& space,
                                           const std::vector<double>& f_values,
                                           std::size_t q, const ConeField& cones,
                                           double delta,
                                           const std::vector<double>& g_values,
                                           double tol) {
    const std::size_t n = frag.size();
    DirectionSpeedReport rep;
    if (n < 2) {
        // No quotients exist at an isolated point; conditions hold vacuously.
        rep.direction_ok.assign(n, true);
        rep.speed_ok.assign(n, true);
        rep.direction_fraction = rep.speed_fraction = rep.joint_fraction = 1.0;
        return rep;
    }
    rep.direction_ok.assign(n, false);
    rep.speed_ok.assign(n, false);
    const auto md = metric_differential(frag, space);
    const auto df = directional_derivative(frag, f_values, q);
    const auto dg = directional_derivative(frag, g_values, 1);
    const auto w = arc_weights(frag);
    double mass = 0.0, dir_mass = 0.0, speed_mass = 0.0, joint_mass = 0.0;
    std::vector<double> u(q);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < q; ++c) u[c] = df[i * q + c];
        rep.direction_ok[i] = cone_contains(cones.at(frag.trace[i]), u, tol);
        rep.speed_ok[i] = dg[i] >= delta * md[i] - tol;
        mass += w[i];
        if (rep.direction_ok[i]) dir_mass += w[i];
        if (rep.speed_ok[i]) speed_mass += w[i];
        if (rep.direction_ok[i] && rep.speed_ok[i]) joint_mass += w[i];
    }
    rep.direction_fraction = dir_mass / mass;
    rep.speed_fraction = speed_mass / mass;
    rep.joint_fraction = joint_mass / mass;
    return rep;
}

}  // namespace lipgeo
