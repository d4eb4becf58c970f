#pragma once

// Selection of alpha* and shape diagnostics.
//
// Criteria: oracle (theoretical g2 sweep), plug-in (empirical g2 from
// winsorized residual moments, with bootstrap sensitivity), grid search over
// bootstrap variance of the full estimator, and a nearest-neighbour lookup
// into a user-supplied (gamma3, gamma4) -> alpha table.  The entropy
// coefficient k is attached as a diagnostic when the plug-in argmin is
// unstable.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "patp/distributions.hpp"
#include "patp/efficiency.hpp"
#include "patp/error.hpp"
#include "patp/estimators.hpp"
#include "patp/moments.hpp"
#include "patp/parallel.hpp"
#include "patp/rng.hpp"

namespace patp {

enum class Criterion { oracle, plugin, grid_mc, table_lookup_stub };

inline std::string_view to_string(Criterion c) noexcept {
    switch (c) {
        case Criterion::oracle: return "oracle";
        case Criterion::plugin: return "plugin";
        case Criterion::grid_mc: return "grid_mc";
        case Criterion::table_lookup_stub: return "table_lookup_stub";
    }
    return "?";
}

enum class Kernel { epanechnikov };

struct EntropyDiagnostic {
    double H_hat = 0.0;
    double k_hat = 0.0;
    std::optional<double> kappa_hat;  // undefined when gamma4_hat <= -3
    double gamma4_hat = 0.0;
    double bandwidth = 0.0;
    Kernel kernel = Kernel::epanechnikov;
};

/// One row of a calibration curve: criterion value at alpha plus a flag
/// ("", "degenerate", "invalid", "band_edge").
struct CalibrationRow {
    double alpha;
    double value;
    std::string flag;
};

struct CalibrationResult {
    double alpha_star = 0.0;
    Criterion criterion = Criterion::oracle;
    std::vector<CalibrationRow> curve;
    double sensitivity_lo = 0.0;
    double sensitivity_hi = 0.0;
    bool ambiguous = false;
    std::optional<double> alpha_star_variance;  // bootstrap variance of the argmin
    bool near_band = false;                     // alpha* adjacent to the excluded band
    std::optional<EntropyDiagnostic> entropy;
    std::string note;
};

inline constexpr double ambiguity_threshold = 0.1;
inline constexpr std::size_t entropy_min_n = 100;
inline constexpr std::size_t plugin_min_n = 30;

// ---------------------------------------------------------------------------
// Entropy coefficient

/// Plug-in differential entropy from an Epanechnikov KDE with Silverman's
/// bandwidth 0.9 min(sd, IQR/1.34) N^{-1/5}, evaluated at the data points.
/// k_hat = exp(H_hat) / (2 sqrt(m2)).
inline EntropyDiagnostic entropy_diagnostic(std::span<const double> residuals) {
    if (residuals.size() < entropy_min_n) {
        throw small_sample("entropy diagnostic needs N >= 100");
    }
    require_finite(residuals);
    std::vector<double> v(residuals.begin(), residuals.end());
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    const double m = mean_of(v);
    double m2 = 0.0, m4 = 0.0;
    for (double x : v) {
        const double d2 = (x - m) * (x - m);
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) throw numeric_error("entropy diagnostic: zero variance");

    const double sd = std::sqrt(m2);
    const double iqr = sorted_quantile(v, 0.75) - sorted_quantile(v, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd;
    const double h = 0.9 * spread * std::pow(n, -0.2);

    double sum_log = 0.0;
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        while (v[lo] < v[i] - h) ++lo;
        while (hi < v.size() && v[hi] <= v[i] + h) ++hi;
        double s = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
            const double u = (v[i] - v[j]) / h;
            s += 0.75 * (1.0 - u * u);
        }
        sum_log += std::log(s / (n * h));
    }
    EntropyDiagnostic d;
    d.H_hat = -sum_log / n;
    d.k_hat = std::exp(d.H_hat) / (2.0 * sd);
    d.gamma4_hat = m4 / (m2 * m2) - 3.0;
    if (d.gamma4_hat > -3.0) d.kappa_hat = 1.0 / std::sqrt(d.gamma4_hat + 3.0);
    d.bandwidth = h;
    return d;
}

struct TopographicPoint {
    std::optional<double> kappa;
    std::optional<double> k;
};

/// Theoretical (kappa, k); both undefined for infinite-variance laws.
inline TopographicPoint topographic_coords(const DistributionSpec& spec) {
    if (!spec.finite_variance()) return {};
    const ShapeSummary s = shape_summary(spec);
    return {s.contrexcess, s.entropy_coeff};
}

/// Empirical (kappa_hat, k_hat) from residuals.
inline TopographicPoint topographic_coords(std::span<const double> residuals) {
    const EntropyDiagnostic d = entropy_diagnostic(residuals);
    return {d.kappa_hat, d.k_hat};
}

// ---------------------------------------------------------------------------
// Oracle

inline CalibrationResult calibrate_oracle(const DistributionSpec& dist, double grid_step = 0.05,
                                          double band = default_sweep_band) {
    const G2Curve curve = g2_sweep(dist, grid_step, band);
    CalibrationResult r;
    r.criterion = Criterion::oracle;
    r.alpha_star = curve.argmin_alpha;
    r.near_band = curve.argmin_at_band_edge;
    double worst = -infinity;
    for (const auto& pt : curve.grid) {
        r.curve.push_back({pt.alpha, pt.g2, pt.degenerate ? "degenerate" : ""});
        worst = std::max(worst, pt.g2);
    }
    // A flat curve (Gaussian) has no meaningful minimiser.
    constexpr double flat_tol = 1e-6;
    r.ambiguous = worst - curve.argmin_g2 < flat_tol;
    r.sensitivity_lo = r.sensitivity_hi = r.alpha_star;
    for (const auto& row : r.curve) {
        if (row.value - curve.argmin_g2 < flat_tol) {
            r.sensitivity_lo = std::min(r.sensitivity_lo, row.alpha);
            r.sensitivity_hi = std::max(r.sensitivity_hi, row.alpha);
        }
    }
    if (r.ambiguous) r.note = "flat g2 curve: no gain over OLS at any alpha";
    if (r.near_band) r.note += (r.note.empty() ? "" : "; ") + std::string("argmin next to the degeneracy band");
    return r;
}

// ---------------------------------------------------------------------------
// Plug-in

struct PluginConfig {
    double grid_step = 0.05;
    double band = default_sweep_band;
    MomentEstimatorConfig moments{0.01, 1e-12, 0.0};
    std::size_t bootstrap_B = 200;
    std::uint64_t seed = 2026;
    unsigned workers = 0;  // 0: PATP_WORKERS or hardware concurrency
};

namespace detail {

struct PluginCurve {
    std::vector<CalibrationRow> rows;
    std::optional<std::size_t> best;
};

inline PluginCurve plugin_curve(std::span<const double> sample, const std::vector<double>& alphas,
                                const MomentEstimatorConfig& base) {
    const double center = mean_of(sample);
    MomentEstimatorConfig cfg = base;
    cfg.zero_floor = base.zero_floor * robust_scale(sample);
    PluginCurve out;
    for (double a : alphas) {
        const FractionalMomentSet m = empirical_moments(sample, center, p2(a), cfg);
        CalibrationRow row{a, 1.0, ""};
        try {
            row.value = g2_closed_form(m);
        } catch (const degenerate_ratio&) {
            row.flag = "degenerate";
        } catch (const numeric_error&) {
            row.value = std::numeric_limits<double>::quiet_NaN();
            row.flag = "invalid";
        }
        if (row.flag.empty() && (!out.best || row.value < out.rows[*out.best].value)) {
            out.best = out.rows.size();
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

inline std::vector<double> resample(std::span<const double> x, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    std::vector<double> out(x.size());
    const auto n = static_cast<double>(x.size());
    for (auto& v : out) {
        auto idx = static_cast<std::size_t>(rng.uniform() * n);
        v = x[std::min(idx, x.size() - 1)];
    }
    return out;
}

inline double variance_pop(std::span<const double> v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

}  // namespace detail

/// Plug-in minimisation of the empirical g2 computed from winsorized
/// moments of residuals about the OLS centre.
inline CalibrationResult calibrate_plugin(std::span<const double> sample,
                                          const PluginConfig& cfg = {}) {
    if (sample.size() < plugin_min_n) throw small_sample("plug-in calibration needs N >= 30");
    require_finite(sample);
    cfg.moments.validate();
    const auto alphas = alpha_grid(cfg.grid_step, cfg.band);

    const double center = mean_of(sample);
    std::vector<double> residuals(sample.size());
    std::transform(sample.begin(), sample.end(), residuals.begin(),
                   [center](double x) { return x - center; });

    detail::PluginCurve pc = detail::plugin_curve(residuals, alphas, cfg.moments);
    if (!pc.best) throw degenerate_ratio("plug-in calibration: every grid point is degenerate");

    CalibrationResult r;
    r.criterion = Criterion::plugin;
    r.alpha_star = pc.rows[*pc.best].alpha;
    r.near_band = std::abs(std::abs(r.alpha_star - 0.5) - cfg.band) < cfg.grid_step + 1e-12;
    if (r.near_band) pc.rows[*pc.best].flag = "band_edge";
    r.curve = std::move(pc.rows);
    r.sensitivity_lo = r.sensitivity_hi = r.alpha_star;

    if (cfg.bootstrap_B > 0) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        std::vector<double> slots(cfg.bootstrap_B, nan);
        parallel_for(cfg.bootstrap_B, [&](std::size_t b) {
            const auto boot = detail::resample(residuals, mix_seed(cfg.seed, b));
            const auto bc = detail::plugin_curve(boot, alphas, cfg.moments);
            if (bc.best) slots[b] = bc.rows[*bc.best].alpha;
        }, cfg.workers);
        std::vector<double> stars;
        for (double a : slots) {
            if (!std::isnan(a)) stars.push_back(a);
        }
        if (!stars.empty()) {
            std::sort(stars.begin(), stars.end());
            r.sensitivity_lo = std::min(r.alpha_star, sorted_quantile(stars, 0.025));
            r.sensitivity_hi = std::max(r.alpha_star, sorted_quantile(stars, 0.975));
            r.alpha_star_variance = detail::variance_pop(stars);
            r.ambiguous = *r.alpha_star_variance > ambiguity_threshold;
        }
        r.note = "ambiguity measured as bootstrap variance of the plug-in argmin";
    }
    if (r.near_band) r.note += "; argmin next to the degeneracy band (unstable)";
    if (r.ambiguous && sample.size() >= entropy_min_n) r.entropy = entropy_diagnostic(residuals);
    return r;
}

// ---------------------------------------------------------------------------
// Grid search over bootstrap variance of the full estimator

inline CalibrationResult calibrate_grid_mc(std::span<const double> sample,
                                           const std::vector<double>& alpha_values,
                                           std::size_t bootstrap_B = 200, std::uint64_t seed = 2026,
                                           const SolverConfig& solver = {}, unsigned workers = 0) {
    if (bootstrap_B < 100) throw invalid_argument("grid calibration needs B >= 100");
    if (alpha_values.empty()) throw invalid_argument("empty alpha grid");
    require_finite(sample);

    std::vector<std::vector<double>> boots;
    boots.reserve(bootstrap_B);
    for (std::size_t b = 0; b < bootstrap_B; ++b) {
        boots.push_back(detail::resample(sample, mix_seed(seed, b)));
    }

    CalibrationResult r;
    r.criterion = Criterion::grid_mc;
    std::vector<double> estimates(bootstrap_B);
    double best = infinity;
    for (double a : alpha_values) {
        const AlphaParam alpha(a, solver.degeneracy_band);
        parallel_for(bootstrap_B, [&](std::size_t b) {
            estimates[b] = estimate_full(boots[b], alpha, solver).theta_hat;
        }, workers);
        const double var = detail::variance_pop(estimates);
        r.curve.push_back({a, var, alpha.is_degenerate() ? "degenerate" : ""});
        if (var < best) {
            best = var;
            r.alpha_star = a;
        }
    }
    r.sensitivity_lo = r.sensitivity_hi = r.alpha_star;
    for (const auto& row : r.curve) {
        if (row.value <= 1.05 * best) {
            r.sensitivity_lo = std::min(r.sensitivity_lo, row.alpha);
            r.sensitivity_hi = std::max(r.sensitivity_hi, row.alpha);
        }
    }
    r.ambiguous = sample.size() < entropy_min_n || r.sensitivity_hi - r.sensitivity_lo > 0.25;
    if (r.ambiguous) r.note = "wide sensitivity interval";
    return r;
}

// ---------------------------------------------------------------------------
// Table lookup

struct AlphaTableEntry {
    double gamma3;
    double gamma4;
    double alpha;
};

/// Reads a CSV with header `gamma3,gamma4,alpha`; `#` lines are comments.
inline std::vector<AlphaTableEntry> load_alpha_table(std::istream& in) {
    std::vector<AlphaTableEntry> table;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line.rfind("gamma3,gamma4,alpha", 0) != 0) {
                throw invalid_argument("alpha table header must be gamma3,gamma4,alpha");
            }
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        AlphaTableEntry e{};
        char c1 = 0, c2 = 0;
        if (!(row >> e.gamma3 >> c1 >> e.gamma4 >> c2 >> e.alpha) || c1 != ',' || c2 != ',') {
            throw invalid_argument("malformed alpha table row: " + line);
        }
        table.push_back(e);
    }
    if (table.empty()) throw invalid_argument("alpha table has no rows");
    return table;
}

inline CalibrationResult calibrate_table_lookup(const std::vector<AlphaTableEntry>& table,
                                                double gamma3, double gamma4) {
    if (table.empty()) throw invalid_argument("empty alpha table");
    const auto nearest = std::min_element(table.begin(), table.end(), [&](const auto& a, const auto& b) {
        return std::hypot(a.gamma3 - gamma3, a.gamma4 - gamma4) <
               std::hypot(b.gamma3 - gamma3, b.gamma4 - gamma4);
    });
    CalibrationResult r;
    r.criterion = Criterion::table_lookup_stub;
    r.alpha_star = nearest->alpha;
    r.sensitivity_lo = r.sensitivity_hi = r.alpha_star;
    r.curve.push_back({nearest->alpha, std::hypot(nearest->gamma3 - gamma3, nearest->gamma4 - gamma4),
                       "nearest"});
    r.note = "nearest-neighbour lookup in a user-supplied table";
    return r;
}

/// `alpha,criterion_value,flag` rows followed by one `# summary` line.
inline void write_calibration_csv(std::ostream& out, const CalibrationResult& r) {
    out << "alpha,criterion_value,flag\n";
    out.precision(10);
    for (const auto& row : r.curve) {
        out << row.alpha << ',';
        if (std::isfinite(row.value)) out << row.value;
        out << ',' << row.flag << '\n';
    }
    out << "# summary: criterion=" << to_string(r.criterion) << " alpha_star=" << r.alpha_star
        << " interval=[" << r.sensitivity_lo << ',' << r.sensitivity_hi << "] ambiguous="
        << (r.ambiguous ? 1 : 0);
    if (r.alpha_star_variance) out << " alpha_star_var=" << *r.alpha_star_variance;
    if (r.entropy) out << " k_hat=" << r.entropy->k_hat;
    if (!r.note.empty()) out << " note=\"" << r.note << '"';
    out << '\n';
}

}  // namespace patp
