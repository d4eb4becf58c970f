#pragma once

// Sign-preserving fractional-power basis and its exponent map.
//
// The basis is phi_1(xi) = xi and, for i >= 2,
//     phi_i(xi; alpha) = sign(xi) * |xi|^{p_i(alpha)},
// where p_i is the unique quadratic in alpha with p_i(0) = 1/i,
// p_i(1/2) = 1 and p_i(1) = i.  alpha = 0 is the fractal (root) regime,
// alpha = 1/2 collapses every member to the identity, alpha = 1 gives
// signed integer powers.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "patp/error.hpp"

namespace patp {

inline constexpr double default_estimator_band = 0.01;
inline constexpr double default_sweep_band = 0.05;

/// Control parameter alpha in [0, 1] plus the half-width of the band around
/// 1/2 inside which F2 is treated as degenerate.
class AlphaParam {
public:
    explicit AlphaParam(double value, double degeneracy_band = default_estimator_band)
        : value_(value), band_(degeneracy_band) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw invalid_argument("alpha must lie in [0, 1], got " + std::to_string(value));
        }
        if (!(degeneracy_band > 0.0)) {
            throw invalid_argument("degeneracy band must be positive");
        }
    }

    double value() const noexcept { return value_; }
    double degeneracy_band() const noexcept { return band_; }
    bool is_degenerate() const noexcept { return std::abs(value_ - 0.5) < band_; }

private:
    double value_;
    double band_;
};

/// Index i >= 1 of a basis member; i = 1 is the fixed linear function.
class BasisIndex {
public:
    explicit BasisIndex(int i) : i_(i) {
        if (i < 1) throw invalid_argument("basis index must be >= 1");
    }
    int value() const noexcept { return i_; }
    bool is_linear() const noexcept { return i_ == 1; }

private:
    int i_;
};

struct SmoothingConfig {
    double epsilon = 0.0;      // (xi^2 + eps^2)^{p/2} smoothing, active only for p < 1
    double zero_floor = 1e-12; // clamp on |xi| before negative exponents

    void validate() const {
        if (!(epsilon >= 0.0)) throw invalid_argument("smoothing epsilon must be >= 0");
        if (!(zero_floor > 0.0)) throw invalid_argument("zero floor must be > 0");
    }
};

/// Evaluates the exponent quadratic at an arbitrary real alpha (no range
/// check). Written in Lagrange form on the nodes {0, 1/2, 1} so the three
/// anchor values come out exact in floating point.
inline double exponent_polynomial(int i, double alpha) noexcept {
    if (i == 1) return 1.0;
    const double l0 = (2.0 * alpha - 1.0) * (alpha - 1.0);
    const double lhalf = 4.0 * alpha * (1.0 - alpha);
    const double l1 = alpha * (2.0 * alpha - 1.0);
    return l0 / i + lhalf + l1 * i;
}

/// p_i(alpha) = 1/i + (4 - i - 3/i) alpha + (2i - 4 + 2/i) alpha^2; 1 for i = 1.
inline double exponent(BasisIndex i, const AlphaParam& alpha) noexcept {
    return exponent_polynomial(i.value(), alpha.value());
}

/// Shorthand for the active exponent of the S = 2 estimator.
inline double p2(double alpha) noexcept { return exponent_polynomial(2, alpha); }

/// Roots of p_i(alpha) = p_j(alpha): {1/2, -1/(ij - 1)}.  The second root is
/// always negative, so on [0, 1] two members only meet at the collapse point.
inline std::pair<double, double> collision_roots(int i, int j) {
    if (i < 1 || j < 1) throw invalid_argument("basis indices must be >= 1");
    if (i == j) throw invalid_argument("collision_roots needs distinct indices");
    const int ij = i * j;
    if (ij <= 1) throw invalid_argument("collision_roots: ij must exceed 1");
    const double second = -1.0 / static_cast<double>(ij - 1);
    if (!(second < 0.0)) throw numeric_error("collision root expected to be negative");
    return {0.5, second};
}

inline double signum(double x) noexcept { return static_cast<double>((x > 0.0) - (x < 0.0)); }

inline double basis_value(BasisIndex i, const AlphaParam& alpha, double xi,
                          const SmoothingConfig& cfg = {}) {
    if (i.is_linear()) return xi;
    const double p = exponent(i, alpha);
    if (p == 1.0) return xi;
    if (cfg.epsilon > 0.0 && p < 1.0) {
        return signum(xi) * std::pow(xi * xi + cfg.epsilon * cfg.epsilon, 0.5 * p);
    }
    return signum(xi) * std::pow(std::abs(xi), p);
}

/// d phi_i / d theta for xi = x - theta.  Even in xi.  Negative exponents
/// (p < 1) see |xi| clamped at zero_floor, or the smoothed radius
/// sqrt(xi^2 + eps^2) when smoothing is on.
inline double basis_location_derivative(BasisIndex i, const AlphaParam& alpha, double xi,
                                        const SmoothingConfig& cfg = {}) {
    if (i.is_linear()) return -1.0;
    const double p = exponent(i, alpha);
    if (p == 1.0) return -1.0;
    if (p < 1.0) {
        if (cfg.epsilon > 0.0) {
            return -p * std::pow(xi * xi + cfg.epsilon * cfg.epsilon, 0.5 * (p - 1.0));
        }
        return -p * std::pow(std::max(std::abs(xi), cfg.zero_floor), p - 1.0);
    }
    return -p * std::pow(std::abs(xi), p - 1.0);
}

}  // namespace patp
