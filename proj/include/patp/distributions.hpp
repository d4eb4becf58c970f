#pragma once

// Canonical noise laws: seedable samplers, densities for the quadrature
// oracle, and theoretical shape summaries (cumulants, contrexcess, entropy
// coefficient).
//
// Every finite-variance symmetric family is standardized to mean 0 and unit
// variance.  Beta(a, b) is centred at its mean a/(a+b) but not rescaled.
// Cauchy is location 0, scale 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "patp/basis.hpp"
#include "patp/error.hpp"
#include "patp/quadrature.hpp"
#include "patp/rng.hpp"

namespace patp {

enum class Family { gaussian, laplace, gg, uniform, beta, cauchy, arcsine, triangular };

class DistributionSpec {
public:
    static DistributionSpec gaussian() { return DistributionSpec(Family::gaussian); }
    static DistributionSpec laplace() { return DistributionSpec(Family::laplace); }
    static DistributionSpec uniform() { return DistributionSpec(Family::uniform); }
    static DistributionSpec cauchy() { return DistributionSpec(Family::cauchy); }
    static DistributionSpec arcsine() { return DistributionSpec(Family::arcsine); }
    static DistributionSpec triangular() { return DistributionSpec(Family::triangular); }
    static DistributionSpec gg(double beta) {
        if (!(beta > 0.0) || !std::isfinite(beta)) {
            throw invalid_argument("generalized Gaussian needs beta > 0");
        }
        return DistributionSpec(Family::gg, beta);
    }
    static DistributionSpec beta(double a, double b) {
        if (!(a > 0.0 && b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
            throw invalid_argument("beta needs a, b > 0");
        }
        return DistributionSpec(Family::beta, a, b);
    }

    /// Parses `laplace`, `gaussian`, `uniform`, `cauchy`, `arcsine`,
    /// `triangular`, `gg:<beta>`, `beta:<a>:<b>`.
    static DistributionSpec parse(std::string_view text) {
        std::vector<std::string> parts;
        std::string item;
        std::istringstream in{std::string(text)};
        while (std::getline(in, item, ':')) parts.push_back(item);
        if (parts.empty()) throw invalid_argument("empty distribution spec");
        const std::string& name = parts[0];
        auto number = [&](std::size_t k) {
            try {
                std::size_t used = 0;
                const double v = std::stod(parts.at(k), &used);
                if (used != parts[k].size()) throw std::invalid_argument("trailing");
                return v;
            } catch (const std::exception&) {
                throw invalid_argument("bad numeric field in distribution spec '" +
                                       std::string(text) + "'");
            }
        };
        auto arity = [&](std::size_t n) {
            if (parts.size() != n) {
                throw invalid_argument("wrong number of fields in distribution spec '" +
                                       std::string(text) + "'");
            }
        };
        if (name == "gaussian" || name == "normal") { arity(1); return gaussian(); }
        if (name == "laplace") { arity(1); return laplace(); }
        if (name == "uniform") { arity(1); return uniform(); }
        if (name == "cauchy") { arity(1); return cauchy(); }
        if (name == "arcsine") { arity(1); return arcsine(); }
        if (name == "triangular" || name == "simpson") { arity(1); return triangular(); }
        if (name == "gg") { arity(2); return gg(number(1)); }
        if (name == "beta") { arity(3); return beta(number(1), number(2)); }
        throw invalid_argument("unknown distribution '" + std::string(text) + "'");
    }

    Family family() const noexcept { return family_; }
    double shape() const noexcept { return a_; }
    double shape_b() const noexcept { return b_; }

    std::string name() const {
        switch (family_) {
            case Family::gaussian: return "gaussian";
            case Family::laplace: return "laplace";
            case Family::uniform: return "uniform";
            case Family::cauchy: return "cauchy";
            case Family::arcsine: return "arcsine";
            case Family::triangular: return "triangular";
            case Family::gg: return "gg:" + format_number(a_);
            case Family::beta: return "beta:" + format_number(a_) + ":" + format_number(b_);
        }
        return "?";
    }

    /// Unit-variance, zero-mean by construction.
    bool standardized() const noexcept {
        return family_ != Family::beta && family_ != Family::cauchy;
    }
    bool symmetric() const noexcept { return family_ != Family::beta || a_ == b_; }
    bool finite_variance() const noexcept { return family_ != Family::cauchy; }

    /// Location the samples are centred on (the theoretical mean, or the
    /// median for Cauchy).  Always 0 under the conventions above.
    double location() const noexcept { return 0.0; }

    double variance() const {
        switch (family_) {
            case Family::cauchy: return infinity;
            case Family::beta: return a_ * b_ / ((a_ + b_) * (a_ + b_) * (a_ + b_ + 1.0));
            default: return 1.0;
        }
    }

    Interval support() const {
        switch (family_) {
            case Family::uniform: return {-std::numbers::sqrt3, std::numbers::sqrt3};
            case Family::arcsine: return {-std::numbers::sqrt2, std::numbers::sqrt2};
            case Family::triangular: return {-std::sqrt(6.0), std::sqrt(6.0)};
            case Family::beta: {
                const double mu = a_ / (a_ + b_);
                return {-mu, 1.0 - mu};
            }
            default: return {};
        }
    }

    /// Scale s of the unit-variance generalized Gaussian exp(-|x/s|^beta).
    static double gg_scale(double beta) {
        return std::exp(0.5 * (std::lgamma(1.0 / beta) - std::lgamma(3.0 / beta)));
    }

    Density density() const {
        switch (family_) {
            case Family::gaussian:
                return plain_density([](double x) {
                    return std::exp(-0.5 * x * x) * std::numbers::inv_sqrtpi / std::numbers::sqrt2;
                });
            case Family::laplace:
                return plain_density([](double x) {
                    constexpr double b = 1.0 / std::numbers::sqrt2;
                    return std::exp(-std::abs(x) / b) / (2.0 * b);
                });
            case Family::gg: {
                const double beta = a_;
                const double s = gg_scale(beta);
                const double log_norm = std::log(beta / (2.0 * s)) - std::lgamma(1.0 / beta);
                return plain_density([=](double x) {
                    return std::exp(log_norm - std::pow(std::abs(x / s), beta));
                });
            }
            case Family::uniform:
                return [](const EdgePoint& e) {
                    return (e.to_lo >= 0.0 && e.to_hi >= 0.0) ? 0.5 / std::numbers::sqrt3 : 0.0;
                };
            case Family::cauchy:
                return plain_density(
                    [](double x) { return std::numbers::inv_pi / (1.0 + x * x); });
            case Family::arcsine:
                return [](const EdgePoint& e) {
                    if (e.to_lo <= 0.0 || e.to_hi <= 0.0) return 0.0;
                    return std::numbers::inv_pi / std::sqrt(e.to_lo * e.to_hi);
                };
            case Family::triangular:
                return [](const EdgePoint& e) {
                    const double d = std::min(e.to_lo, e.to_hi);
                    return d <= 0.0 ? 0.0 : d / 6.0;
                };
            case Family::beta: {
                const double a = a_, b = b_;
                const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
                return [=](const EdgePoint& e) {
                    if (e.to_lo <= 0.0 || e.to_hi <= 0.0) return 0.0;
                    return std::exp((a - 1.0) * std::log(e.to_lo) + (b - 1.0) * std::log(e.to_hi) -
                                    log_beta);
                };
            }
        }
        return plain_density([](double) { return 0.0; });
    }

    friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;

private:
    explicit DistributionSpec(Family f, double a = 0.0, double b = 0.0) : family_(f), a_(a), b_(b) {}

    static std::string format_number(double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    }

    Family family_;
    double a_;
    double b_;
};

/// One draw from `spec` using `rng`.
inline double draw(const DistributionSpec& spec, Xoshiro256& rng) {
    switch (spec.family()) {
        case Family::gaussian: return rng.normal();
        case Family::laplace: {
            constexpr double b = 1.0 / std::numbers::sqrt2;
            const double u = rng.uniform_open() - 0.5;
            return -b * signum(u) * std::log1p(-2.0 * std::abs(u));
        }
        case Family::gg: {
            const double beta = spec.shape();
            const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
            const double g = rng.gamma(1.0 / beta);
            return DistributionSpec::gg_scale(beta) * sign * std::pow(g, 1.0 / beta);
        }
        case Family::uniform: return std::numbers::sqrt3 * (2.0 * rng.uniform() - 1.0);
        case Family::beta: {
            const double ga = rng.gamma(spec.shape());
            const double gb = rng.gamma(spec.shape_b());
            return ga / (ga + gb) - spec.shape() / (spec.shape() + spec.shape_b());
        }
        case Family::cauchy: return std::tan(std::numbers::pi * (rng.uniform_open() - 0.5));
        case Family::arcsine:
            return std::numbers::sqrt2 * std::sin(std::numbers::pi * (rng.uniform() - 0.5));
        case Family::triangular:
            return std::sqrt(6.0) * (rng.uniform() + rng.uniform() - 1.0);
    }
    return 0.0;
}

/// n draws, deterministic in (spec, n, seed).
inline std::vector<double> sample(const DistributionSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw invalid_argument("sample size must be >= 1");
    Xoshiro256 rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = draw(spec, rng);
    return out;
}

/// Excess kurtosis of GG(beta): Gamma(5/b) Gamma(1/b) / Gamma(3/b)^2 - 3.
inline double gg_kurtosis(double beta) {
    if (!(beta > 0.0)) throw invalid_argument("gg_kurtosis needs beta > 0");
    return std::exp(std::lgamma(5.0 / beta) + std::lgamma(1.0 / beta) -
                    2.0 * std::lgamma(3.0 / beta)) -
           3.0;
}

struct ShapeSummary {
    std::optional<double> gamma3;
    std::optional<double> gamma4;
    std::optional<double> contrexcess;     // 1 / sqrt(gamma4 + 3)
    std::optional<double> entropy;         // differential entropy H
    std::optional<double> entropy_coeff;   // k = e^H / (2 sigma)
    std::optional<double> entropic_error;  // e^H / 2
};

/// Differential entropy -int f ln f by quadrature.
inline double entropy_by_quadrature(const DistributionSpec& spec) {
    const Density f = spec.density();
    auto g = [&](double, const EdgePoint& e) {
        const double v = f(e);
        return v > 0.0 ? -v * std::log(v) : 0.0;
    };
    auto [r, l] = integrate_halves(g, spec.support(), 0.0);
    return r + l;
}

/// Closed-form cumulants where known; entropy (and hence k) by quadrature.
inline ShapeSummary shape_summary(const DistributionSpec& spec) {
    ShapeSummary s;
    switch (spec.family()) {
        case Family::gaussian: s.gamma3 = 0.0; s.gamma4 = 0.0; break;
        case Family::laplace: s.gamma3 = 0.0; s.gamma4 = 3.0; break;
        case Family::gg: s.gamma3 = 0.0; s.gamma4 = gg_kurtosis(spec.shape()); break;
        case Family::uniform: s.gamma3 = 0.0; s.gamma4 = -1.2; break;
        case Family::arcsine: s.gamma3 = 0.0; s.gamma4 = -1.5; break;
        case Family::triangular: s.gamma3 = 0.0; s.gamma4 = -0.6; break;
        case Family::beta: {
            const double a = spec.shape(), b = spec.shape_b();
            s.gamma3 = 2.0 * (b - a) * std::sqrt(a + b + 1.0) / ((a + b + 2.0) * std::sqrt(a * b));
            s.gamma4 = 6.0 * ((a - b) * (a - b) * (a + b + 1.0) - a * b * (a + b + 2.0)) /
                       (a * b * (a + b + 2.0) * (a + b + 3.0));
            break;
        }
        case Family::cauchy: break;
    }
    if (s.gamma4 && *s.gamma4 > -3.0) s.contrexcess = 1.0 / std::sqrt(*s.gamma4 + 3.0);
    s.entropy = entropy_by_quadrature(spec);
    if (spec.finite_variance()) {
        const double e_h = std::exp(*s.entropy);
        s.entropic_error = 0.5 * e_h;
        s.entropy_coeff = e_h / (2.0 * std::sqrt(spec.variance()));
    }
    return s;
}

}  // namespace patp
