#pragma once

// Monte Carlo driver, CSV emission and the runtime micro-benchmark.
//
// Every replicate sample is drawn from a seed that depends only on
// (base_seed, distribution label, N, replicate), so all estimators in a
// (distribution, N) block see the same replicate set and ARE is a paired
// comparison.  Per-replicate results land in slots indexed by replicate, so
// the output is identical for any worker count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "patp/baselines.hpp"
#include "patp/distributions.hpp"
#include "patp/efficiency.hpp"
#include "patp/error.hpp"
#include "patp/estimators.hpp"
#include "patp/parallel.hpp"
#include "patp/rng.hpp"

namespace patp {

inline const std::vector<std::string>& alpha_estimators() {
    static const std::vector<std::string> names{"proxy", "full"};
    return names;
}

inline bool is_alpha_estimator(const std::string& name) {
    return name == "proxy" || name == "full";
}

/// Validates an estimator name: ols, proxy, full or a baseline id.
inline void check_estimator_name(const std::string& name) {
    if (name == "ols" || is_alpha_estimator(name)) return;
    parse_baseline(name);
}

struct McDesign {
    std::vector<DistributionSpec> distributions;
    std::vector<std::size_t> n_values;
    std::vector<double> alpha_values;
    std::size_t replicates = 1000;
    std::uint64_t base_seed = 2026;
    std::vector<std::string> estimators{"ols", "proxy", "full"};
    unsigned workers = 0;  // 0: PATP_WORKERS or hardware concurrency
    SolverConfig solver{};

    void validate() const {
        if (replicates < 1) throw invalid_argument("replicates must be >= 1");
        if (distributions.empty()) throw invalid_argument("design has no distributions");
        if (n_values.empty()) throw invalid_argument("design has no sample sizes");
        if (estimators.empty()) throw invalid_argument("design has no estimators");
        for (std::size_t n : n_values) {
            if (n < 2) throw invalid_argument("sample sizes must be >= 2");
        }
        bool needs_alpha = false;
        for (const auto& e : estimators) {
            check_estimator_name(e);
            needs_alpha = needs_alpha || is_alpha_estimator(e);
        }
        if (needs_alpha && alpha_values.empty()) {
            throw invalid_argument("proxy/full estimators need at least one alpha");
        }
        for (double a : alpha_values) {
            if (!(a >= 0.0 && a <= 1.0)) throw invalid_argument("alpha values must lie in [0, 1]");
        }
        solver.validate();
    }
};

/// Sample-size-and-shape grid of the desk-scale study.
inline McDesign default_design() {
    McDesign d;
    d.distributions = {DistributionSpec::laplace(), DistributionSpec::gg(1.5), DistributionSpec::gg(4.0),
                       DistributionSpec::beta(2.0, 5.0)};
    d.n_values = {50, 100, 200, 500};
    d.alpha_values = {0.05, 0.30, 0.70, 0.95};
    d.replicates = 1000;
    d.base_seed = 2026;
    return d;
}

struct McRecord {
    std::string distribution;
    std::size_t n = 0;
    std::optional<double> alpha;
    std::string estimator;
    double var = 0.0;
    double bias = 0.0;
    double mse = 0.0;
    double are = 0.0;
    double g2_emp = 0.0;
    std::optional<double> g2_theo;
    std::size_t replicates = 0;  // successful replicates used in the aggregates
    std::uint64_t seed = 0;
    double rel_mse = 0.0;        // mse / mse(mean) on the same replicates
    std::size_t failures = 0;
};

/// Seed of replicate r in the (distribution, N) block.
inline std::uint64_t replicate_seed(std::uint64_t base, const DistributionSpec& d, std::size_t n,
                                    std::size_t r) {
    return mix_seed(base, hash_label(d.name()), n, r);
}

namespace detail {

struct McColumn {
    std::string estimator;
    std::optional<double> alpha;
};

inline std::vector<McColumn> mc_columns(const McDesign& d) {
    std::vector<McColumn> cols;
    for (const auto& e : d.estimators) {
        if (is_alpha_estimator(e)) {
            for (double a : d.alpha_values) cols.push_back({e, a});
        } else {
            cols.push_back({e, std::nullopt});
        }
    }
    return cols;
}

inline double run_column(const McColumn& c, std::span<const double> x, const SolverConfig& solver) {
    if (c.estimator == "ols") return mean_of(x);
    if (c.estimator == "proxy") return estimate_proxy(x, AlphaParam(*c.alpha, solver.degeneracy_band), solver).theta_hat;
    if (c.estimator == "full") return estimate_full(x, AlphaParam(*c.alpha, solver.degeneracy_band), solver).theta_hat;
    return run_baseline(parse_baseline(c.estimator), x);
}

inline std::optional<double> theoretical_g2(const McColumn& c, const DistributionSpec& d) {
    if (c.estimator == "ols" || c.estimator == "mean") return 1.0;
    if (c.estimator != "full") return std::nullopt;
    try {
        return g2_closed_form(theoretical_moments(d, p2(*c.alpha)));
    } catch (const degenerate_ratio&) {
        return 1.0;
    } catch (const error&) {
        return std::nullopt;
    }
}

struct Moments2 {
    double mean = 0.0, var = 0.0;
};

inline Moments2 population_moments(const std::vector<double>& v) {
    Moments2 m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    for (double x : v) m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(v.size());
    return m;
}

}  // namespace detail

/// Runs every (distribution, N, alpha, estimator) cell of the design.
/// Estimator exceptions are counted per cell; the OLS reference is always
/// computed so ARE and rel_mse are defined for every row.
inline std::vector<McRecord> run_mc(const McDesign& design) {
    design.validate();
    const auto cols = detail::mc_columns(design);
    const std::size_t nc = cols.size();
    const std::size_t M = design.replicates;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<McRecord> out;

    for (const auto& dist : design.distributions) {
        std::vector<std::optional<double>> theo(nc);
        for (std::size_t c = 0; c < nc; ++c) theo[c] = detail::theoretical_g2(cols[c], dist);
        const double truth = dist.location();

        for (std::size_t n : design.n_values) {
            // slot layout: [r][0] = mean reference, [r][1 + c] = column c
            std::vector<double> slots(M * (nc + 1), nan);
            parallel_for(
                M,
                [&](std::size_t r) {
                    const auto x = sample(dist, n, replicate_seed(design.base_seed, dist, n, r));
                    double* row = &slots[r * (nc + 1)];
                    row[0] = mean_of(x);
                    for (std::size_t c = 0; c < nc; ++c) {
                        try {
                            const double v = detail::run_column(cols[c], x, design.solver);
                            row[1 + c] = std::isfinite(v) ? v : nan;
                        } catch (const std::exception&) {
                            row[1 + c] = nan;
                        }
                    }
                },
                design.workers);

            for (std::size_t c = 0; c < nc; ++c) {
                std::vector<double> est, ref;
                est.reserve(M);
                ref.reserve(M);
                for (std::size_t r = 0; r < M; ++r) {
                    const double v = slots[r * (nc + 1) + 1 + c];
                    if (std::isnan(v)) continue;
                    est.push_back(v);
                    ref.push_back(slots[r * (nc + 1)]);
                }
                McRecord rec;
                rec.distribution = dist.name();
                rec.n = n;
                rec.alpha = cols[c].alpha;
                rec.estimator = cols[c].estimator;
                rec.g2_theo = theo[c];
                rec.replicates = est.size();
                rec.failures = M - est.size();
                rec.seed = design.base_seed;
                if (est.empty()) {
                    rec.var = rec.bias = rec.mse = rec.are = rec.g2_emp = rec.rel_mse = nan;
                    out.push_back(rec);
                    continue;
                }
                const auto e = detail::population_moments(est);
                const auto o = detail::population_moments(ref);
                rec.var = e.var;
                rec.bias = e.mean - truth;
                rec.mse = rec.var + rec.bias * rec.bias;
                const double ref_bias = o.mean - truth;
                const double ref_mse = o.var + ref_bias * ref_bias;
                rec.are = e.var > 0.0 ? o.var / e.var : nan;
                rec.g2_emp = o.var > 0.0 ? e.var / o.var : nan;
                rec.rel_mse = ref_mse > 0.0 ? rec.mse / ref_mse : nan;
                out.push_back(rec);
            }
        }
    }
    return out;
}

/// run_mc over the six location baselines.
inline std::vector<McRecord> run_baseline_mc(McDesign design) {
    design.estimators.clear();
    for (BaselineId id : all_baselines) design.estimators.emplace_back(to_string(id));
    design.alpha_values.clear();
    return run_mc(design);
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_number(double v) {
    if (!std::isfinite(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_number(const std::optional<double>& v) {
    return v ? csv_number(*v) : std::string();
}

inline constexpr const char* mc_csv_header =
    "distribution,n,alpha,estimator,var,bias,mse,are,g2_emp,g2_theo,replicates,seed,rel_mse,failures";

inline void write_mc_csv(std::ostream& out, const std::vector<McRecord>& records) {
    out << mc_csv_header << '\n';
    for (const auto& r : records) {
        out << r.distribution << ',' << r.n << ',' << csv_number(r.alpha) << ',' << r.estimator << ','
            << csv_number(r.var) << ',' << csv_number(r.bias) << ',' << csv_number(r.mse) << ','
            << csv_number(r.are) << ',' << csv_number(r.g2_emp) << ',' << csv_number(r.g2_theo) << ','
            << r.replicates << ',' << r.seed << ',' << csv_number(r.rel_mse) << ',' << r.failures
            << '\n';
    }
}

// ---------------------------------------------------------------------------
// Ablation summary: best proxy alpha per (distribution, N)

struct AblationRow {
    std::string distribution;
    std::size_t n;
    std::string estimator;
    double best_alpha;
    double best_are;
};

inline std::vector<AblationRow> ablation_summary(const std::vector<McRecord>& records,
                                                 const std::string& estimator = "proxy") {
    std::vector<AblationRow> rows;
    std::map<std::pair<std::string, std::size_t>, std::size_t> index;
    for (const auto& r : records) {
        if (r.estimator != estimator || !r.alpha || !std::isfinite(r.are)) continue;
        const auto key = std::make_pair(r.distribution, r.n);
        auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(key, rows.size());
            rows.push_back({r.distribution, r.n, estimator, *r.alpha, r.are});
        } else if (r.are > rows[it->second].best_are) {
            rows[it->second].best_alpha = *r.alpha;
            rows[it->second].best_are = r.are;
        }
    }
    return rows;
}

inline void write_ablation_csv(std::ostream& out, const std::vector<AblationRow>& rows) {
    out << "distribution,n,estimator,best_alpha,best_are\n";
    for (const auto& r : rows) {
        out << r.distribution << ',' << r.n << ',' << r.estimator << ',' << csv_number(r.best_alpha)
            << ',' << csv_number(r.best_are) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Runtime benchmark

struct BenchRecord {
    std::string estimator;
    std::size_t n = 0;
    double per_call_ms = 0.0;  // median over batches of batch time / batch size
    std::size_t batch_size = 0;
    std::size_t batches = 0;
};

/// Times each estimator on one Laplace sample per N.  `estimators` accepts
/// the McDesign names; proxy and full run at `alpha`.
inline std::vector<BenchRecord> run_bench(const std::vector<std::size_t>& n_values,
                                          const std::vector<std::string>& estimators,
                                          std::size_t batch, std::size_t batches = 5,
                                          double alpha = 0.05, std::uint64_t seed = 2026) {
    if (batch < 10) throw invalid_argument("bench batch must be >= 10");
    if (batches < 1) throw invalid_argument("bench needs at least one batch");
    for (const auto& e : estimators) check_estimator_name(e);
    const SolverConfig solver{};
    std::vector<BenchRecord> out;
    volatile double sink = 0.0;
    for (std::size_t n : n_values) {
        const auto x = sample(DistributionSpec::laplace(), n, mix_seed(seed, n));
        for (const auto& e : estimators) {
            detail::McColumn col{e, std::nullopt};
            if (is_alpha_estimator(e)) col.alpha = alpha;
            std::vector<double> times;
            for (std::size_t b = 0; b < batches; ++b) {
                const auto t0 = std::chrono::steady_clock::now();
                for (std::size_t i = 0; i < batch; ++i) sink = sink + detail::run_column(col, x, solver);
                const auto t1 = std::chrono::steady_clock::now();
                const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
                times.push_back(ms / static_cast<double>(batch));
            }
            std::sort(times.begin(), times.end());
            double med = times[times.size() / 2];
            if (times.size() % 2 == 0) med = 0.5 * (med + times[times.size() / 2 - 1]);
            // Clock resolution floor keeps per_call_ms strictly positive.
            med = std::max(med, 1e-9);
            out.push_back({e, n, med, batch, batches});
        }
    }
    return out;
}

inline void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& rows) {
    out << "estimator,n,per_call_ms,batch_size,batches,nondeterministic\n";
    for (const auto& r : rows) {
        out << r.estimator << ',' << r.n << ',' << csv_number(r.per_call_ms) << ',' << r.batch_size << ','
            << r.batches << ",1\n";
    }
}

}  // namespace patp
