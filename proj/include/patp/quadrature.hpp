#pragma once

// Adaptive double-exponential quadrature used as the ground-truth oracle for
// the gamma-function closed forms.  Backed by Boost.Math: tanh-sinh on finite
// intervals, exp-sinh on half-lines.  Both tolerate integrable endpoint
// singularities, which is exactly what |x - c|^q with q < 0 produces once the
// integral is split at the centre c.
//
// Integrands receive an EdgePoint carrying the distance to each support edge
// computed without cancellation, so densities with singular edges (arcsine)
// can be evaluated accurately arbitrarily close to the boundary.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "patp/error.hpp"

namespace patp {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

struct Interval {
    double lo = -infinity;
    double hi = infinity;

    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    bool finite() const noexcept { return std::isfinite(lo) && std::isfinite(hi); }
};

struct EdgePoint {
    double x;
    double to_lo;  // x - lo, accurate near lo
    double to_hi;  // hi - x, accurate near hi
};

using Density = std::function<double(const EdgePoint&)>;

/// Adapts a plain f(x) density.
template <typename F>
Density plain_density(F f) {
    return [f = std::move(f)](const EdgePoint& e) { return f(e.x); };
}

struct QuadratureTolerance {
    double absolute = 1e-10;
    double relative = 1e-8;
};

namespace detail {

inline void check_quadrature(double value, double err, const QuadratureTolerance& tol) {
    if (!std::isfinite(value)) throw numeric_error("quadrature: non-finite integral");
    if (err > std::max(tol.absolute, tol.relative * std::abs(value))) {
        throw numeric_error("quadrature did not converge (error estimate " + std::to_string(err) +
                            ")");
    }
}

/// Integral over t in (0, length) of g(t, far), where `far` is length - t
/// computed from the quadrature complement.  length may be +inf.
template <typename G>
double integrate_from_zero(G&& g, double length, const QuadratureTolerance& tol) {
    if (!(length > 0.0)) return 0.0;
    double err = 0.0;
    double value = 0.0;
    if (std::isinf(length)) {
        boost::math::quadrature::exp_sinh<double> integrator(12);
        auto f = [&](double t) { return g(t, infinity); };
        value = integrator.integrate(f, 1e-13, &err);
    } else {
        boost::math::quadrature::tanh_sinh<double> integrator(15);
        auto f = [&](double t, double tc) {
            const double far = tc > 0.0 ? tc : length - t;
            return g(t, far);
        };
        value = integrator.integrate(f, 0.0, length, 1e-13, &err);
    }
    check_quadrature(value, err, tol);
    return value;
}

}  // namespace detail

/// Integral of g(EdgePoint) over the support, split at `center` so a kink or
/// an integrable singularity at the centre sits on a quadrature endpoint.
/// Returns {right half, left half}.
template <typename G>
std::pair<double, double> integrate_halves(G&& g, Interval support, double center,
                                           const QuadratureTolerance& tol = {}) {
    const double c = std::clamp(center, support.lo, support.hi);
    auto right = [&](double t, double far) {
        return g(t, EdgePoint{c + t, (c - support.lo) + t, far});
    };
    auto left = [&](double t, double far) {
        return g(t, EdgePoint{c - t, far, (support.hi - c) + t});
    };
    return {detail::integrate_from_zero(right, support.hi - c, tol),
            detail::integrate_from_zero(left, c - support.lo, tol)};
}

/// Integral of h(EdgePoint) * density over the support.
template <typename H>
double integrate_density(const Density& density, H&& h, Interval support, double center,
                         const QuadratureTolerance& tol = {}) {
    auto g = [&](double, const EdgePoint& e) {
        const double f = density(e);
        return f == 0.0 ? 0.0 : h(e) * f;
    };
    auto [r, l] = integrate_halves(g, support, center, tol);
    return r + l;
}

/// E|X - center|^q under `density`, which must integrate to one on `support`.
inline double quadrature_moment(const Density& density, double q, Interval support,
                                double center = 0.0, const QuadratureTolerance& tol = {}) {
    auto g = [&](double t, const EdgePoint& e) {
        const double f = density(e);
        return f == 0.0 ? 0.0 : std::pow(t, q) * f;
    };
    auto [r, l] = integrate_halves(g, support, center, tol);
    return r + l;
}

/// E[sign(X - center) |X - center|^q].
inline double quadrature_signed_moment(const Density& density, double q, Interval support,
                                       double center = 0.0, const QuadratureTolerance& tol = {}) {
    auto g = [&](double t, const EdgePoint& e) {
        const double f = density(e);
        return f == 0.0 ? 0.0 : std::pow(t, q) * f;
    };
    auto [r, l] = integrate_halves(g, support, center, tol);
    return r - l;
}

}  // namespace patp
