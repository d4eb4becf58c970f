#pragma once

// Scalar location estimators built on the S = 2 fractional basis:
//   * estimate_full  - one-step-Newey F2^{-1} b solver with an outer loop
//   * estimate_proxy - signed-power M-estimator solved by bracketing
//   * estimate_ols   - sample mean
// plus a damped, score-decreasing Newton iteration for scalar equations.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "patp/basis.hpp"
#include "patp/efficiency.hpp"
#include "patp/error.hpp"
#include "patp/moments.hpp"

namespace patp {

struct SolverConfig {
    int max_outer_iters = 3;
    double tol = 1e-8;                 // relative step tolerance
    double cond_cap = 1e10;
    double det_threshold = 1e-14;
    double step_clip_sd = 3.0;
    double damping = 0.5;              // Newton factor for the first damped_iters steps
    int damped_iters = 5;
    int max_newton_iters = 100;
    double degeneracy_band = default_estimator_band;
    double bracket_expansion = 10.0;   // initial half-width in MADs
    int max_bracket_doublings = 60;

    void validate() const {
        if (max_outer_iters < 1) throw invalid_argument("max_outer_iters must be >= 1");
        if (!(tol > 0.0)) throw invalid_argument("tol must be > 0");
        if (!(damping > 0.0 && damping <= 1.0)) throw invalid_argument("damping must lie in (0, 1]");
        if (!(bracket_expansion > 1.0)) throw invalid_argument("bracket_expansion must exceed 1");
        if (!(step_clip_sd > 0.0)) throw invalid_argument("step_clip_sd must be > 0");
        if (!(degeneracy_band > 0.0)) throw invalid_argument("degeneracy_band must be > 0");
    }
};

enum class Method { full, proxy, ols_fallback };

inline std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::full: return "full";
        case Method::proxy: return "proxy";
        case Method::ols_fallback: return "ols_fallback";
    }
    return "?";
}

struct EstimateResult {
    double theta_hat = 0.0;
    Method method = Method::ols_fallback;
    int outer_iters = 0;
    double final_step = 0.0;
    double cond_last = 0.0;
    double det_last = 0.0;
    bool converged = false;
    bool smoothed = false;  // smoothed basis was switched on for repeated zeros
};

// ---------------------------------------------------------------------------
// Sample summaries

inline void require_finite(std::span<const double> sample) {
    if (sample.empty()) throw invalid_argument("empty sample");
    for (double x : sample) {
        if (!std::isfinite(x)) throw non_finite_input("sample contains NaN or Inf");
    }
}

inline double mean_of(std::span<const double> x) {
    if (x.empty()) throw invalid_argument("mean of empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for n = 1.
inline double sd_of(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

inline double median_of(std::span<const double> x) {
    if (x.empty()) throw invalid_argument("median of empty sample");
    std::vector<double> v(x.begin(), x.end());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

/// Raw median absolute deviation about the median (no consistency factor).
inline double mad_of(std::span<const double> x) {
    const double med = median_of(x);
    std::vector<double> dev(x.size());
    std::transform(x.begin(), x.end(), dev.begin(), [med](double v) { return std::abs(v - med); });
    return median_of(dev);
}

inline double iqr_of(std::span<const double> x) {
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    return sorted_quantile(v, 0.75) - sorted_quantile(v, 0.25);
}

/// MAD if positive, else 1.
inline double robust_scale(std::span<const double> x) {
    const double mad = mad_of(x);
    return mad > 0.0 ? mad : 1.0;
}

// ---------------------------------------------------------------------------
// OLS

inline EstimateResult estimate_ols(std::span<const double> sample) {
    require_finite(sample);
    EstimateResult r;
    r.theta_hat = mean_of(sample);
    r.method = Method::ols_fallback;
    r.converged = true;
    return r;
}

// ---------------------------------------------------------------------------
// Damped Newton

struct NewtonResult {
    double root = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// theta <- theta - lambda Z / Z', lambda = damping for the first
/// damped_iters steps and 1 afterwards.  A step is accepted only when |Z|
/// decreases; otherwise lambda is halved (up to 40 times).
inline NewtonResult damped_newton_scalar(const std::function<double(double)>& score,
                                         const std::function<double(double)>& slope, double start,
                                         const SolverConfig& cfg = {}) {
    double theta = start;
    double z = score(theta);
    if (!std::isfinite(slope(theta))) throw numeric_error("damped_newton: slope not finite at start");
    for (int k = 0; k < cfg.max_newton_iters; ++k) {
        if (z == 0.0) return {theta, k, true};
        const double dz = slope(theta);
        if (!std::isfinite(dz) || dz == 0.0) {
            throw numeric_error("damped_newton: zero or non-finite slope");
        }
        const double full_step = -z / dz;
        double lambda = k < cfg.damped_iters ? cfg.damping : 1.0;
        bool accepted = false;
        double next = theta, z_next = z;
        for (int halvings = 0; halvings < 40; ++halvings) {
            next = theta + lambda * full_step;
            z_next = score(next);
            if (std::isfinite(z_next) && std::abs(z_next) < std::abs(z)) {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            // No decrease available at floating-point resolution.
            return {theta, k + 1, std::abs(full_step) < cfg.tol * std::max(1.0, std::abs(theta))};
        }
        const double step = next - theta;
        theta = next;
        z = z_next;
        if (std::abs(step) < cfg.tol * std::max(1.0, std::abs(theta))) return {theta, k + 1, true};
    }
    throw numeric_error("damped_newton: no convergence within the iteration cap");
}

// ---------------------------------------------------------------------------
// Proxy M-estimator

/// sum_n sign(x_n - mu) |x_n - mu|^p; strictly decreasing in mu for p > 0.
inline double signed_power_score(std::span<const double> sample, double mu, double p) {
    double s = 0.0;
    if (p == 1.0) {
        for (double x : sample) s += x - mu;
        return s;
    }
    for (double x : sample) {
        const double xi = x - mu;
        s += signum(xi) * std::pow(std::abs(xi), p);
    }
    return s;
}

/// d/dmu of the signed-power score: -p sum |x_n - mu|^{p-1} (floored).
inline double signed_power_slope(std::span<const double> sample, double mu, double p,
                                 double zero_floor) {
    double s = 0.0;
    for (double x : sample) s += std::pow(std::max(std::abs(x - mu), zero_floor), p - 1.0);
    return -p * s;
}

/// Root of the signed-power score by bracketing: start at median +- k MAD and
/// double until the score changes sign, then refine with TOMS 748.
inline EstimateResult estimate_proxy(std::span<const double> sample, const AlphaParam& alpha,
                                     const SolverConfig& cfg = {}) {
    require_finite(sample);
    cfg.validate();
    const double p = p2(alpha.value());
    EstimateResult r;
    r.method = Method::proxy;

    const auto [lo_it, hi_it] = std::minmax_element(sample.begin(), sample.end());
    if (*lo_it == *hi_it) {
        r.theta_hat = *lo_it;
        r.converged = true;
        return r;
    }
    const double center = median_of(sample);
    double width = mad_of(sample);
    if (!(width > 0.0)) width = sd_of(sample);
    width *= cfg.bracket_expansion;

    double lo = center - width, hi = center + width;
    double s_lo = signed_power_score(sample, lo, p);
    double s_hi = signed_power_score(sample, hi, p);
    int doublings = 0;
    while (!(s_lo >= 0.0 && s_hi <= 0.0)) {
        if (++doublings > cfg.max_bracket_doublings) {
            throw numeric_error("estimate_proxy: no sign change after bracket doubling");
        }
        width *= 2.0;
        if (s_lo < 0.0) {
            lo = center - width;
            s_lo = signed_power_score(sample, lo, p);
        }
        if (s_hi > 0.0) {
            hi = center + width;
            s_hi = signed_power_score(sample, hi, p);
        }
    }
    if (s_lo == 0.0 || s_hi == 0.0) {
        r.theta_hat = s_lo == 0.0 ? lo : hi;
        r.converged = true;
        return r;
    }
    std::uintmax_t max_iter = 200;
    auto f = [&](double mu) { return signed_power_score(sample, mu, p); };
    // Terminate when the bracket is a few ulps wide.
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, lo, hi, s_lo, s_hi, boost::math::tools::eps_tolerance<double>(50), max_iter);
    r.theta_hat = 0.5 * (a + b);
    r.final_step = b - a;
    r.outer_iters = static_cast<int>(max_iter);
    r.converged = max_iter < 200;
    return r;
}

// ---------------------------------------------------------------------------
// Full F2^{-1} b estimator

namespace detail {

inline EstimateResult proxy_fallback(std::span<const double> sample, const AlphaParam& alpha,
                                     const SolverConfig& cfg, const EstimateResult& so_far) {
    EstimateResult r = estimate_proxy(sample, alpha, cfg);
    r.outer_iters = so_far.outer_iters;
    r.cond_last = so_far.cond_last;
    r.det_last = so_far.det_last;
    r.smoothed = so_far.smoothed;
    return r;
}

inline int count_exact_ties(std::span<const double> sample, double center) {
    return static_cast<int>(std::count(sample.begin(), sample.end(), center));
}

}  // namespace detail

/// One-step-Newey estimator: at the current centre build F2 and b from the
/// empirical moments, take h = F2^{-1} b, and apply the Newton step
/// -Z / Z' with Z = h1 mean(xi) + h2 sigma_p, Z' = -h1 - p h2 nu_{p-1},
/// clipped to step_clip_sd sample standard deviations.  Repeats up to
/// max_outer_iters times.  Ill-conditioned F2 or a vanishing slope hands
/// over to the proxy; alpha inside the degeneracy band returns the mean.
inline EstimateResult estimate_full(std::span<const double> sample, const AlphaParam& alpha,
                                    const SolverConfig& cfg = {}) {
    require_finite(sample);
    cfg.validate();
    EstimateResult r;
    r.theta_hat = mean_of(sample);

    if (std::abs(alpha.value() - 0.5) < cfg.degeneracy_band) {
        r.method = Method::ols_fallback;
        r.converged = true;
        return r;
    }
    r.method = Method::full;

    const double p = p2(alpha.value());
    const double scale = robust_scale(sample);
    double clip = cfg.step_clip_sd * sd_of(sample);
    if (!std::isfinite(clip)) clip = cfg.step_clip_sd * iqr_of(sample);

    MomentEstimatorConfig mcfg;
    mcfg.zero_floor = 1e-12 * scale;
    const SystemLimits limits{cfg.det_threshold, cfg.cond_cap};

    for (int k = 1; k <= cfg.max_outer_iters; ++k) {
        r.outer_iters = k;
        if (p < 1.0 && mcfg.smoothing_epsilon == 0.0 &&
            detail::count_exact_ties(sample, r.theta_hat) >= 2) {
            mcfg.smoothing_epsilon = 1e-6 * scale;
            r.smoothed = true;
        }
        const FractionalMomentSet m = empirical_moments(sample, r.theta_hat, p, mcfg);
        const CorrelantSystem sys = assemble_correlant_system(m, limits);
        r.cond_last = sys.cond;
        r.det_last = sys.det;
        if (!sys.solved) return detail::proxy_fallback(sample, alpha, cfg, r);

        double xi_bar = 0.0;
        for (double x : sample) xi_bar += x - r.theta_hat;
        xi_bar /= static_cast<double>(sample.size());

        const double z = sys.h1 * xi_bar + sys.h2 * m.sigma_p;
        const double dz = -sys.h1 - p * sys.h2 * m.nu_pm1;
        if (!std::isfinite(dz) || dz == 0.0) return detail::proxy_fallback(sample, alpha, cfg, r);

        const double step = std::clamp(-z / dz, -clip, clip);
        r.theta_hat += step;
        r.final_step = step;
        if (std::abs(step) < cfg.tol * std::max(1.0, std::abs(r.theta_hat))) {
            r.converged = true;
            break;
        }
    }
    return r;
}

}  // namespace patp
