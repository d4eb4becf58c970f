#pragma once

// Fractional absolute moments nu_q = E|xi|^q and signed moments
// sigma_q = E[sign(xi) |xi|^q], empirical and theoretical.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "patp/basis.hpp"
#include "patp/distributions.hpp"
#include "patp/error.hpp"
#include "patp/quadrature.hpp"

namespace patp {

/// The five scalars feeding F2 and b at exponent p = p_2(alpha).
struct FractionalMomentSet {
    double p = 1.0;
    double c2 = 0.0;      // E[xi^2]
    double nu_pm1 = 0.0;  // nu_{p-1}
    double nu_pp1 = 0.0;  // nu_{p+1}
    double nu_2p = 0.0;   // nu_{2p}
    double sigma_p = 0.0; // sigma_p

    bool finite() const noexcept {
        return std::isfinite(p) && std::isfinite(c2) && std::isfinite(nu_pm1) &&
               std::isfinite(nu_pp1) && std::isfinite(nu_2p) && std::isfinite(sigma_p);
    }
};

struct MomentEstimatorConfig {
    double winsor_fraction = 0.0;  // tail fraction of |xi| capped at the (1-f) quantile
    double zero_floor = 1e-12;     // clamp on |xi| under negative exponents
    double smoothing_epsilon = 0.0;

    void validate() const {
        if (!(winsor_fraction >= 0.0 && winsor_fraction <= 0.25)) {
            throw invalid_argument("winsor fraction must lie in [0, 0.25]");
        }
        if (!(zero_floor > 0.0)) throw invalid_argument("zero floor must be > 0");
        if (!(smoothing_epsilon >= 0.0)) throw invalid_argument("smoothing epsilon must be >= 0");
    }
};

/// Linear-interpolation (type 7) quantile of already sorted data.
inline double sorted_quantile(std::span<const double> sorted, double prob) {
    if (sorted.empty()) throw invalid_argument("quantile of empty data");
    const double pos = prob * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return sorted[lo] + w * (sorted[hi] - sorted[lo]);
}

/// Sample moments of xi_n = x_n - center.  With smoothing on and p < 1 the
/// fractional terms use the smoothed radius sqrt(xi^2 + eps^2) in place of
/// |xi|, matching the smoothed basis.
inline FractionalMomentSet empirical_moments(std::span<const double> sample, double center,
                                             double p, const MomentEstimatorConfig& cfg = {}) {
    if (sample.empty()) throw invalid_argument("empirical_moments: empty sample");
    if (!(p > 0.0)) throw invalid_argument("empirical_moments: p must be > 0");
    cfg.validate();

    double cap = infinity;
    if (cfg.winsor_fraction > 0.0) {
        std::vector<double> abs_res(sample.size());
        std::transform(sample.begin(), sample.end(), abs_res.begin(),
                       [center](double x) { return std::abs(x - center); });
        std::sort(abs_res.begin(), abs_res.end());
        cap = sorted_quantile(abs_res, 1.0 - cfg.winsor_fraction);
    }

    const bool smooth = cfg.smoothing_epsilon > 0.0 && p < 1.0;
    const double eps2 = cfg.smoothing_epsilon * cfg.smoothing_epsilon;
    const bool unit = p == 1.0;

    double s_c2 = 0.0, s_pm1 = 0.0, s_pp1 = 0.0, s_2p = 0.0, s_sig = 0.0;
    for (double x : sample) {
        const double xi = x - center;
        const double a = std::min(std::abs(xi), cap);
        const double sgn = signum(xi);
        s_c2 += a * a;
        double pw;    // the magnitude of phi_2
        double dpw;   // the magnitude of d phi_2 / d xi, divided by p
        if (unit) {
            pw = a;
            dpw = 1.0;
        } else if (smooth) {
            const double r2 = a * a + eps2;
            pw = sgn == 0.0 ? 0.0 : std::pow(r2, 0.5 * p);
            dpw = std::pow(r2, 0.5 * (p - 1.0));
        } else {
            pw = std::pow(a, p);
            dpw = p < 1.0 ? std::pow(std::max(a, cfg.zero_floor), p - 1.0) : std::pow(a, p - 1.0);
        }
        s_pm1 += dpw;
        s_pp1 += a * pw;
        s_2p += pw * pw;
        s_sig += sgn * pw;
    }
    const double n = static_cast<double>(sample.size());
    return {p, s_c2 / n, s_pm1 / n, s_pp1 / n, s_2p / n, s_sig / n};
}

namespace detail {

inline double gg_abs_moment(double beta, double q) {
    const double s = DistributionSpec::gg_scale(beta);
    return std::pow(s, q) * std::exp(std::lgamma((q + 1.0) / beta) - std::lgamma(1.0 / beta));
}

}  // namespace detail

/// E|X - center|^q by quadrature against the density.
inline double quadrature_moment(const DistributionSpec& spec, double q, double center = 0.0) {
    return quadrature_moment(spec.density(), q, spec.support(), center);
}

/// nu_q about the distribution's location.  Gamma closed forms for the
/// Gaussian, Laplace and GG families, quadrature otherwise.
inline double theoretical_abs_moment(const DistributionSpec& spec, double q) {
    if (!(q > -1.0)) {
        throw non_finite_moment("nu_q diverges for q <= -1 (density positive at the centre)");
    }
    switch (spec.family()) {
        case Family::gaussian: return detail::gg_abs_moment(2.0, q);
        case Family::laplace: return detail::gg_abs_moment(1.0, q);
        case Family::gg: return detail::gg_abs_moment(spec.shape(), q);
        case Family::cauchy:
            if (q >= 1.0) {
                throw non_finite_moment("Cauchy absolute moments are finite only for q < 1 (q = " +
                                        std::to_string(q) + ")");
            }
            return 1.0 / std::cos(0.5 * std::numbers::pi * q);
        default: return quadrature_moment(spec, q, spec.location());
    }
}

inline double theoretical_signed_moment(const DistributionSpec& spec, double q) {
    if (spec.symmetric()) {
        if (spec.family() == Family::cauchy && q >= 1.0) {
            throw non_finite_moment("Cauchy signed moments are finite only for q < 1");
        }
        return 0.0;
    }
    return quadrature_signed_moment(spec.density(), q, spec.support(), spec.location());
}

/// Population moment set at exponent p.  Throws non_finite_moment when any
/// required order diverges (all of them need a finite variance).
inline FractionalMomentSet theoretical_moments(const DistributionSpec& spec, double p) {
    if (!(p > 0.0)) throw invalid_argument("theoretical_moments: p must be > 0");
    if (!spec.finite_variance()) {
        throw non_finite_moment(spec.name() + ": c2 is infinite; the S = 2 efficiency formula "
                                              "does not apply");
    }
    FractionalMomentSet m;
    m.p = p;
    m.c2 = theoretical_abs_moment(spec, 2.0);
    m.nu_pm1 = p == 1.0 ? 1.0 : theoretical_abs_moment(spec, p - 1.0);
    m.nu_pp1 = theoretical_abs_moment(spec, p + 1.0);
    m.nu_2p = theoretical_abs_moment(spec, 2.0 * p);
    m.sigma_p = theoretical_signed_moment(spec, p);
    return m;
}

}  // namespace patp
