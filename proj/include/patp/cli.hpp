#pragma once

// Command-line front end.  cli_main returns 0 on success, 1 on a usage
// error and 2 on a runtime error, printing a one-line diagnostic to `err`.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "patp/baselines.hpp"
#include "patp/calibration.hpp"
#include "patp/distributions.hpp"
#include "patp/efficiency.hpp"
#include "patp/error.hpp"
#include "patp/estimators.hpp"
#include "patp/harness.hpp"

namespace patp {

/// One real per line; blank lines and anything after `#` are ignored.
inline std::vector<double> read_data(std::istream& in) {
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double v;
        if (!(ss >> v)) {
            std::string rest;
            if (std::istringstream(line) >> rest) {
                throw invalid_argument("line " + std::to_string(lineno) + ": not a number");
            }
            continue;
        }
        std::string trailing;
        if (ss >> trailing) throw invalid_argument("line " + std::to_string(lineno) + ": one value per line");
        out.push_back(v);
    }
    if (out.empty()) throw invalid_argument("data file holds no values");
    return out;
}

inline std::vector<double> read_data_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot read '" + path + "'");
    return read_data(in);
}

/// A distribution file names a law and a sample size to draw:
/// `<dist> <n> [seed]` on its first non-comment line.
inline std::vector<double> read_dist_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot read '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string dist;
        if (!(ss >> dist)) continue;
        std::size_t n = 0;
        std::uint64_t seed = 2026;
        if (!(ss >> n) || n < 1) throw invalid_argument("distribution file: expected '<dist> <n> [seed]'");
        ss >> seed;
        return sample(DistributionSpec::parse(dist), n, seed);
    }
    throw invalid_argument("distribution file is empty");
}

namespace detail {

inline std::string file_label(std::string s) {
    for (char& c : s) {
        if (c == ':') c = '_';
    }
    return s;
}

/// Writes to `path`, or to `fallback` when path is empty or "-".
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(fallback);
        return;
    }
    std::ofstream f(path);
    if (!f) throw error("cannot write '" + path + "'");
    fn(f);
    if (!f) throw error("write failed for '" + path + "'");
}

inline void write_sweep_csv(std::ostream& out, const G2Curve& curve) {
    out << "alpha,p,g2,degenerate,argmin\n";
    for (const auto& pt : curve.grid) {
        out << csv_number(pt.alpha) << ',' << csv_number(p2(pt.alpha)) << ',' << csv_number(pt.g2) << ','
            << (pt.degenerate ? 1 : 0) << ',' << (pt.alpha == curve.argmin_alpha ? 1 : 0) << '\n';
    }
}

inline std::vector<DistributionSpec> parse_dists(const std::vector<std::string>& names) {
    std::vector<DistributionSpec> out;
    for (const auto& n : names) out.push_back(DistributionSpec::parse(n));
    return out;
}

inline McDesign design_from_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot read '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw invalid_argument(std::string("design file: ") + e.what());
    }
    McDesign d = default_design();
    try {
        if (j.contains("distributions")) d.distributions = parse_dists(j["distributions"].get<std::vector<std::string>>());
        if (j.contains("n")) d.n_values = j["n"].get<std::vector<std::size_t>>();
        if (j.contains("alpha")) d.alpha_values = j["alpha"].get<std::vector<double>>();
        if (j.contains("replicates")) d.replicates = j["replicates"].get<std::size_t>();
        if (j.contains("seed")) d.base_seed = j["seed"].get<std::uint64_t>();
        if (j.contains("estimators")) d.estimators = j["estimators"].get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw invalid_argument(std::string("design file: ") + e.what());
    }
    return d;
}

inline void write_topographic_csv(std::ostream& out, const std::vector<DistributionSpec>& dists) {
    out << "distribution,kappa,k\n";
    for (const auto& d : dists) {
        const auto t = topographic_coords(d);
        out << d.name() << ',' << csv_number(t.kappa) << ',' << csv_number(t.k) << '\n';
    }
}

inline std::vector<DistributionSpec> canonical_shapes() {
    return {DistributionSpec::gaussian(), DistributionSpec::laplace(),   DistributionSpec::uniform(),
            DistributionSpec::arcsine(),  DistributionSpec::triangular(), DistributionSpec::gg(0.5),
            DistributionSpec::gg(1.5),    DistributionSpec::gg(4.0),      DistributionSpec::beta(2.0, 5.0),
            DistributionSpec::cauchy()};
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    CLI::App app{"Fractional-power location estimation toolkit"};
    app.require_subcommand(1);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "theoretical g2(alpha) sweep");
    std::string sweep_dist, sweep_out;
    double sweep_step = 0.05, sweep_band = default_sweep_band;
    sweep->add_option("--dist", sweep_dist, "distribution, e.g. laplace, gg:4, beta:2:5")->required();
    sweep->add_option("--step", sweep_step, "grid step");
    sweep->add_option("--band", sweep_band, "half-width of the excluded band around 1/2");
    sweep->add_option("--out", sweep_out, "output CSV (default stdout)");

    // estimate
    auto* est = app.add_subcommand("estimate", "estimate the location of a sample");
    std::string est_data, est_dist_file, est_method = "full";
    double est_alpha = 0.05;
    auto* data_opt = est->add_option("--data", est_data, "file with one value per line");
    auto* dist_opt = est->add_option("--dist-file", est_dist_file, "file with '<dist> <n> [seed]'");
    data_opt->excludes(dist_opt);
    est->add_option("--alpha", est_alpha, "shape parameter in [0, 1]");
    est->add_option("--method", est_method, "full | proxy | ols")
        ->check(CLI::IsMember({"full", "proxy", "ols"}));

    // mc
    auto* mc = app.add_subcommand("mc", "Monte Carlo study of ols/proxy/full");
    std::string mc_design, mc_out = ".";
    std::vector<std::string> mc_dists, mc_estimators;
    std::vector<std::size_t> mc_n;
    std::vector<double> mc_alpha;
    std::size_t mc_m = 0;
    std::uint64_t mc_seed = 0;
    bool mc_seed_set = false;
    mc->add_option("--design", mc_design, "JSON design file");
    mc->add_option("--dist", mc_dists, "distributions")->delimiter(',');
    mc->add_option("--n", mc_n, "sample sizes")->delimiter(',');
    mc->add_option("--alpha", mc_alpha, "alpha values")->delimiter(',');
    mc->add_option("--estimators", mc_estimators, "ols, proxy, full or baseline names")->delimiter(',');
    mc->add_option("-M,--replicates", mc_m, "replicates per cell");
    auto* mc_seed_opt = mc->add_option("--seed", mc_seed, "base seed");
    mc->add_option("--out", mc_out, "output directory");

    // baselines
    auto* base = app.add_subcommand("baselines", "Monte Carlo study of the robust baselines");
    std::vector<std::string> base_dists;
    std::vector<std::size_t> base_n;
    std::size_t base_m = 1000;
    std::uint64_t base_seed = 2026;
    std::string base_out = ".";
    base->add_option("--dist", base_dists, "distributions")->delimiter(',');
    base->add_option("--n", base_n, "sample sizes")->delimiter(',');
    base->add_option("-M,--replicates", base_m, "replicates per cell");
    base->add_option("--seed", base_seed, "base seed");
    base->add_option("--out", base_out, "output directory");

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "choose alpha*");
    std::string cal_data, cal_dist, cal_criterion = "plugin", cal_table, cal_out;
    double cal_step = 0.05, cal_band = default_sweep_band;
    std::size_t cal_b = 200;
    std::uint64_t cal_seed = 2026;
    cal->add_option("--data", cal_data, "sample file (plugin, grid, table)");
    cal->add_option("--dist", cal_dist, "distribution (oracle)");
    cal->add_option("--criterion", cal_criterion, "oracle | plugin | grid | table")
        ->check(CLI::IsMember({"oracle", "plugin", "grid", "table"}));
    cal->add_option("--table", cal_table, "CSV gamma3,gamma4,alpha (table)");
    cal->add_option("--step", cal_step, "grid step");
    cal->add_option("--band", cal_band, "excluded band half-width");
    cal->add_option("-B,--bootstrap", cal_b, "bootstrap resamples");
    cal->add_option("--seed", cal_seed, "bootstrap seed");
    cal->add_option("--out", cal_out, "output CSV (default stdout)");

    // bench
    auto* bench = app.add_subcommand("bench", "per-call runtime micro-benchmark");
    std::vector<std::size_t> bench_n{1000, 10000};
    std::vector<std::string> bench_est{"ols", "median", "huber", "proxy", "full"};
    std::size_t bench_batch = 20, bench_batches = 5;
    std::string bench_out;
    bench->add_option("--n", bench_n, "sample sizes")->delimiter(',');
    bench->add_option("--estimators", bench_est, "estimators")->delimiter(',');
    bench->add_option("--batch", bench_batch, "calls per batch (>= 10)");
    bench->add_option("--batches", bench_batches, "number of batches");
    bench->add_option("--out", bench_out, "output CSV (default stdout)");

    // reproduce-all
    auto* repro = app.add_subcommand("reproduce-all", "regenerate every result CSV");
    std::string repro_out;
    std::uint64_t repro_seed = 2026;
    std::size_t repro_m = 1000;
    repro->add_option("--out", repro_out, "output directory")->required();
    repro->add_option("--seed", repro_seed, "base seed");
    repro->add_option("-M,--replicates", repro_m, "replicates per Monte Carlo cell");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 1;
    }
    mc_seed_set = mc_seed_opt->count() > 0;

    namespace fs = std::filesystem;
    try {
        if (sweep->parsed()) {
            const G2Curve curve = g2_sweep(DistributionSpec::parse(sweep_dist), sweep_step, sweep_band);
            detail::emit(sweep_out, out, [&](std::ostream& o) { detail::write_sweep_csv(o, curve); });
        } else if (est->parsed()) {
            if (est_data.empty() && est_dist_file.empty()) {
                err << "usage error: estimate needs --data or --dist-file\n";
                return 1;
            }
            const auto x = est_data.empty() ? read_dist_file(est_dist_file) : read_data_file(est_data);
            if (!(est_alpha >= 0.0 && est_alpha <= 1.0)) throw invalid_argument("alpha must lie in [0, 1]");
            const AlphaParam alpha(est_alpha);
            EstimateResult r;
            if (est_method == "full") r = estimate_full(x, alpha);
            else if (est_method == "proxy") r = estimate_proxy(x, alpha);
            else r = estimate_ols(x);
            out << "theta_hat,method,alpha,n,outer_iters,converged,cond_last,smoothed\n"
                << csv_number(r.theta_hat) << ',' << to_string(r.method) << ',' << csv_number(est_alpha)
                << ',' << x.size() << ',' << r.outer_iters << ',' << (r.converged ? 1 : 0) << ','
                << csv_number(r.cond_last) << ',' << (r.smoothed ? 1 : 0) << '\n';
        } else if (mc->parsed()) {
            McDesign d = mc_design.empty() ? default_design() : detail::design_from_json(mc_design);
            if (!mc_dists.empty()) d.distributions = detail::parse_dists(mc_dists);
            if (!mc_n.empty()) d.n_values = mc_n;
            if (!mc_alpha.empty()) d.alpha_values = mc_alpha;
            if (!mc_estimators.empty()) d.estimators = mc_estimators;
            if (mc_m > 0) d.replicates = mc_m;
            if (mc_seed_set) d.base_seed = mc_seed;
            fs::create_directories(mc_out);
            const auto records = run_mc(d);
            detail::emit((fs::path(mc_out) / "mc.csv").string(), out,
                         [&](std::ostream& o) { write_mc_csv(o, records); });
        } else if (base->parsed()) {
            McDesign d = default_design();
            if (!base_dists.empty()) d.distributions = detail::parse_dists(base_dists);
            d.n_values = base_n.empty() ? std::vector<std::size_t>{100} : base_n;
            d.replicates = base_m;
            d.base_seed = base_seed;
            fs::create_directories(base_out);
            const auto records = run_baseline_mc(d);
            detail::emit((fs::path(base_out) / "robust_baselines.csv").string(), out,
                         [&](std::ostream& o) { write_mc_csv(o, records); });
        } else if (cal->parsed()) {
            CalibrationResult r;
            if (cal_criterion == "oracle") {
                if (cal_dist.empty()) {
                    err << "usage error: oracle calibration needs --dist\n";
                    return 1;
                }
                r = calibrate_oracle(DistributionSpec::parse(cal_dist), cal_step, cal_band);
            } else {
                if (cal_data.empty()) {
                    err << "usage error: " << cal_criterion << " calibration needs --data\n";
                    return 1;
                }
                const auto x = read_data_file(cal_data);
                if (cal_criterion == "plugin") {
                    PluginConfig pc;
                    pc.grid_step = cal_step;
                    pc.band = cal_band;
                    pc.bootstrap_B = cal_b;
                    pc.seed = cal_seed;
                    r = calibrate_plugin(x, pc);
                } else if (cal_criterion == "grid") {
                    r = calibrate_grid_mc(x, alpha_grid(cal_step, cal_band), cal_b, cal_seed);
                } else {
                    if (cal_table.empty()) {
                        err << "usage error: table calibration needs --table\n";
                        return 1;
                    }
                    std::ifstream tin(cal_table);
                    if (!tin) throw error("cannot read '" + cal_table + "'");
                    const auto table = load_alpha_table(tin);
                    const double m = mean_of(x);
                    double m2 = 0, m3 = 0, m4 = 0;
                    for (double v : x) {
                        const double d = v - m;
                        m2 += d * d;
                        m3 += d * d * d;
                        m4 += d * d * d * d;
                    }
                    const double n = static_cast<double>(x.size());
                    m2 /= n;
                    m3 /= n;
                    m4 /= n;
                    if (!(m2 > 0.0)) throw numeric_error("table calibration: zero variance");
                    r = calibrate_table_lookup(table, m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0);
                }
            }
            detail::emit(cal_out, out, [&](std::ostream& o) { write_calibration_csv(o, r); });
        } else if (bench->parsed()) {
            const auto rows = run_bench(bench_n, bench_est, bench_batch, bench_batches);
            detail::emit(bench_out, out, [&](std::ostream& o) { write_bench_csv(o, rows); });
        } else if (repro->parsed()) {
            const fs::path dir(repro_out);
            fs::create_directories(dir);
            nlohmann::json manifest;
            manifest["seed"] = repro_seed;
            manifest["replicates"] = repro_m;
            std::vector<std::string> files;
            auto write = [&](const std::string& name, auto&& fn) {
                detail::emit((dir / name).string(), out, fn);
                files.push_back(name);
            };

            for (const auto& d : detail::canonical_shapes()) {
                if (!d.finite_variance()) continue;
                const G2Curve curve = g2_sweep(d, 0.05, default_sweep_band);
                write("sweep_" + detail::file_label(d.name()) + ".csv",
                      [&](std::ostream& o) { detail::write_sweep_csv(o, curve); });
            }

            McDesign design = default_design();
            design.base_seed = repro_seed;
            design.replicates = repro_m;
            const auto mc_records = run_mc(design);
            write("mc_proxy_full.csv", [&](std::ostream& o) { write_mc_csv(o, mc_records); });

            auto ablation = ablation_summary(mc_records, "proxy");
            const auto full_ablation = ablation_summary(mc_records, "full");
            ablation.insert(ablation.end(), full_ablation.begin(), full_ablation.end());
            write("alpha_ablation_summary.csv", [&](std::ostream& o) { write_ablation_csv(o, ablation); });

            McDesign bdesign = design;
            bdesign.distributions.insert(bdesign.distributions.begin(), DistributionSpec::gaussian());
            const auto base_records = run_baseline_mc(bdesign);
            write("robust_baselines.csv", [&](std::ostream& o) { write_mc_csv(o, base_records); });

            write("topographic.csv",
                  [&](std::ostream& o) { detail::write_topographic_csv(o, detail::canonical_shapes()); });

            write("entropy_coefficients.csv", [&](std::ostream& o) {
                o << "distribution,k_theory,k_hat,n\n";
                constexpr std::size_t n = 5000;
                for (const auto& d : {DistributionSpec::gaussian(), DistributionSpec::laplace(),
                                      DistributionSpec::uniform(), DistributionSpec::arcsine(),
                                      DistributionSpec::triangular()}) {
                    const auto x = sample(d, n, mix_seed(repro_seed, hash_label(d.name()), n));
                    o << d.name() << ',' << csv_number(shape_summary(d).entropy_coeff) << ','
                      << csv_number(entropy_diagnostic(x).k_hat) << ',' << n << '\n';
                }
            });

            for (const auto& d : {DistributionSpec::laplace(), DistributionSpec::gg(4.0)}) {
                const auto x = sample(d, 500, mix_seed(repro_seed, hash_label(d.name()), 500));
                PluginConfig pc;
                pc.seed = repro_seed;
                const auto r = calibrate_plugin(x, pc);
                write("calibration_plugin_" + detail::file_label(d.name()) + ".csv",
                      [&](std::ostream& o) { write_calibration_csv(o, r); });
            }

            const auto bench_rows = run_bench({1000, 10000}, {"ols", "median", "huber", "proxy", "full"}, 20);
            write("runtime_summary.csv", [&](std::ostream& o) { write_bench_csv(o, bench_rows); });

            manifest["files"] = files;
            manifest["notes"] = nlohmann::json::array({
                "beta:a:b samples are centred at the distribution mean a/(a+b) and not rescaled",
                "all other finite-variance laws are standardised to zero location and unit variance",
                "runtime_summary.csv timings are machine-dependent and excluded from determinism checks"});
            std::ofstream mf(dir / "manifest.json");
            if (!mf) throw error("cannot write manifest.json");
            mf << manifest.dump(2) << '\n';
            out << "wrote " << files.size() + 1 << " files to " << dir.string() << '\n';
        }
    } catch (const invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace patp
