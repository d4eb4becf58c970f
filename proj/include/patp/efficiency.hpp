#pragma once

// Centred correlant system of the S = 2 fractional basis, the closed-form
// variance-reduction coefficient g2, and alpha sweeps.
//
//   F2 = [[c2, nu_{p+1}], [nu_{p+1}, nu_{2p} - sigma_p^2]],  b = (1, p nu_{p-1})
//   g2 = 1 / (c2 b' F2^{-1} b)
//      = [c2 (nu_2p - sigma_p^2) - nu_{p+1}^2]
//        / (c2 [nu_2p - sigma_p^2 - 2 p nu_{p+1} nu_{p-1} + p^2 c2 nu_{p-1}^2])

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "patp/basis.hpp"
#include "patp/distributions.hpp"
#include "patp/error.hpp"
#include "patp/moments.hpp"

namespace patp {

struct SystemLimits {
    double det_threshold = 1e-14;
    double cond_cap = 1e10;
};

struct CorrelantSystem {
    double f11 = 0.0, f12 = 0.0, f22 = 0.0;
    double b1 = 1.0, b2 = 0.0;
    double h1 = 0.0, h2 = 0.0;
    double det = 0.0;
    double cond = infinity;
    bool solved = false;  // h holds F2^{-1} b

    /// b' F2^{-1} b, valid when solved.
    double quadratic_form() const noexcept { return b1 * h1 + b2 * h2; }
};

/// Ratio of eigenvalue magnitudes of a symmetric 2x2 matrix.
inline double condition_number_2x2(double a, double b, double d) noexcept {
    const double half_trace = 0.5 * (a + d);
    const double radius = std::hypot(0.5 * (a - d), b);
    const double l1 = std::abs(half_trace + radius);
    const double l2 = std::abs(half_trace - radius);
    const double big = std::max(l1, l2);
    const double small = std::min(l1, l2);
    if (small == 0.0) return infinity;
    return big / small;
}

/// Assembles F2 and b and solves for h when the system passes the
/// determinant and condition checks.  Never throws on singularity; `solved`
/// records the outcome.
inline CorrelantSystem assemble_correlant_system(const FractionalMomentSet& m,
                                                 const SystemLimits& limits = {}) {
    if (!m.finite()) throw non_finite_moment("correlant system needs finite moments");
    CorrelantSystem s;
    s.f11 = m.c2;
    s.f12 = m.nu_pp1;
    s.f22 = m.nu_2p - m.sigma_p * m.sigma_p;
    s.b1 = 1.0;
    s.b2 = m.p * m.nu_pm1;
    s.det = s.f11 * s.f22 - s.f12 * s.f12;
    s.cond = condition_number_2x2(s.f11, s.f12, s.f22);
    if (std::abs(s.det) >= limits.det_threshold && s.cond <= limits.cond_cap) {
        s.h1 = (s.f22 * s.b1 - s.f12 * s.b2) / s.det;
        s.h2 = (s.f11 * s.b2 - s.f12 * s.b1) / s.det;
        s.solved = std::isfinite(s.h1) && std::isfinite(s.h2);
    }
    return s;
}

/// As assemble_correlant_system, throwing singular_system when F2 cannot be
/// inverted safely.
inline CorrelantSystem build_correlant_system(const FractionalMomentSet& m,
                                              const SystemLimits& limits = {}) {
    CorrelantSystem s = assemble_correlant_system(m, limits);
    if (!s.solved) {
        throw singular_system("F2 is singular or ill-conditioned (det = " + std::to_string(s.det) +
                              ", cond = " + std::to_string(s.cond) + ")");
    }
    return s;
}

/// Closed-form g2.  Throws degenerate_ratio on the 0/0 collapse and
/// numeric_error on a non-positive denominator.
inline double g2_closed_form(const FractionalMomentSet& m) {
    if (!m.finite()) throw non_finite_moment("g2 needs finite moments");
    const double f22 = m.nu_2p - m.sigma_p * m.sigma_p;
    const double num = m.c2 * f22 - m.nu_pp1 * m.nu_pp1;
    const double inner = f22 - 2.0 * m.p * m.nu_pp1 * m.nu_pm1 + m.p * m.p * m.c2 * m.nu_pm1 * m.nu_pm1;
    const double den = m.c2 * inner;
    const double scale = m.c2 * std::abs(f22) + m.nu_pp1 * m.nu_pp1;
    const double tiny = 1e-14 * std::max(scale, 1e-300);
    if (std::abs(num) < tiny && std::abs(den) < tiny) {
        throw degenerate_ratio("g2 is 0/0 (F2 collapses to rank one at p = 1)");
    }
    if (!(den > 0.0)) {
        throw numeric_error("g2 denominator is not positive (" + std::to_string(den) + ")");
    }
    return num / den;
}

/// Classical PMM2 coefficient 1 - gamma3^2 / (2 + gamma4).
inline double g2_classical(double gamma3, double gamma4) {
    if (!(gamma4 > -2.0)) throw invalid_argument("g2_classical needs gamma4 > -2");
    return 1.0 - gamma3 * gamma3 / (2.0 + gamma4);
}

/// g2 at alpha = 1 for a symmetric law, written directly in nu_1, nu_3, nu_4.
inline double g2_symmetric_signed_square(double c2, double nu1, double nu3, double nu4) {
    return (c2 * nu4 - nu3 * nu3) / (c2 * (nu4 - 4.0 * nu3 * nu1 + 4.0 * c2 * nu1 * nu1));
}

struct G2Point {
    double alpha;
    double g2;
    bool degenerate;  // 0/0 collapse, g2 reported as its nominal limit 1
};

struct G2Curve {
    std::vector<G2Point> grid;
    double argmin_alpha = 0.0;
    double argmin_g2 = 0.0;
    double band = 0.0;                // excluded: |alpha - 1/2| < band
    bool argmin_at_band_edge = false; // minimum sits on the first grid point past the band
};

/// Grid {0, step, ..., 1} minus the open band |alpha - 1/2| < band.
inline std::vector<double> alpha_grid(double step, double band) {
    if (!(step > 0.0 && step <= 0.25)) throw invalid_argument("grid step must lie in (0, 0.25]");
    if (!(band >= 0.0 && band < 0.5)) throw invalid_argument("band must lie in [0, 0.5)");
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor(1.0 / step + 1e-9));
    for (long k = 0; k <= count; ++k) {
        const double a = std::min(1.0, std::round(static_cast<double>(k) * step * 1e9) / 1e9);
        if (std::abs(a - 0.5) < band - 1e-12) continue;
        out.push_back(a);
    }
    if (out.back() < 1.0 - 1e-12) out.push_back(1.0);
    return out;
}

/// Evaluates g2 on a grid of alphas from a moment provider m(p).
template <typename MomentsAt>
G2Curve g2_curve(MomentsAt&& moments_at, const std::vector<double>& alphas, double band,
                 double step_hint = 0.0) {
    if (alphas.empty()) throw invalid_argument("empty alpha grid");
    G2Curve curve;
    curve.band = band;
    for (double a : alphas) {
        const FractionalMomentSet m = moments_at(p2(a));
        G2Point pt{a, 1.0, false};
        try {
            pt.g2 = g2_closed_form(m);
        } catch (const degenerate_ratio&) {
            pt.degenerate = true;
        }
        curve.grid.push_back(pt);
    }
    const auto best = std::min_element(curve.grid.begin(), curve.grid.end(),
                                       [](const G2Point& x, const G2Point& y) { return x.g2 < y.g2; });
    curve.argmin_alpha = best->alpha;
    curve.argmin_g2 = best->g2;
    if (step_hint > 0.0) {
        curve.argmin_at_band_edge =
            std::abs(std::abs(curve.argmin_alpha - 0.5) - band) < step_hint + 1e-12;
    }
    return curve;
}

/// Theoretical g2 sweep on [0, 1] with the degeneracy band removed.
inline G2Curve g2_sweep(const DistributionSpec& dist, double grid_step = 0.05,
                        double band = default_sweep_band) {
    const auto alphas = alpha_grid(grid_step, band);
    return g2_curve([&](double p) { return theoretical_moments(dist, p); }, alphas, band,
                    grid_step);
}

}  // namespace patp
