#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "patp/distributions.hpp"
#include "patp/moments.hpp"

using namespace patp;

namespace {

double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, f - i / n, (i + 1) / n - f});
    }
    return d;
}

// 1% critical value of the one-sample KS statistic, asymptotic form.
double ks_critical(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

double sample_var(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= x.size();
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / (x.size() - 1);
}

}  // namespace

TEST(Parse, RoundTripsNames) {
    for (const char* s : {"laplace", "gaussian", "uniform", "cauchy", "arcsine", "triangular", "gg:4",
                          "gg:1.5", "beta:2:5"}) {
        const auto d = DistributionSpec::parse(s);
        EXPECT_EQ(DistributionSpec::parse(d.name()), d) << s;
    }
    EXPECT_EQ(DistributionSpec::parse("normal"), DistributionSpec::gaussian());
    EXPECT_EQ(DistributionSpec::parse("simpson"), DistributionSpec::triangular());
    EXPECT_THROW(DistributionSpec::parse("gg"), invalid_argument);
    EXPECT_THROW(DistributionSpec::parse("gg:-1"), invalid_argument);
    EXPECT_THROW(DistributionSpec::parse("beta:2"), invalid_argument);
    EXPECT_THROW(DistributionSpec::parse("weibull"), invalid_argument);
}

struct KsCase {
    const char* spec;
    std::function<double(double)> cdf;
};

TEST(Sampling, KolmogorovSmirnovAgainstClosedFormCdfs) {
    const double b = 1.0 / std::numbers::sqrt2;
    const double r3 = std::numbers::sqrt3, r2 = std::numbers::sqrt2, r6 = std::sqrt(6.0);
    auto gg_cdf = [](double beta) {
        const double s = std::sqrt(std::tgamma(1.0 / beta) / std::tgamma(3.0 / beta));
        return [=](double x) {
            const double g = boost::math::gamma_p(1.0 / beta, std::pow(std::abs(x) / s, beta));
            return x < 0 ? 0.5 * (1 - g) : 0.5 * (1 + g);
        };
    };
    const std::vector<KsCase> cases{
        {"gaussian", [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }},
        {"laplace", [b](double x) { return x < 0 ? 0.5 * std::exp(x / b) : 1 - 0.5 * std::exp(-x / b); }},
        {"uniform", [r3](double x) { return std::clamp((x + r3) / (2 * r3), 0.0, 1.0); }},
        {"arcsine", [r2](double x) { return 0.5 + std::asin(std::clamp(x / r2, -1.0, 1.0)) / std::numbers::pi; }},
        {"triangular",
         [r6](double x) {
             const double u = std::clamp(x, -r6, r6);
             return u < 0 ? (u + r6) * (u + r6) / 12.0 : 1 - (r6 - u) * (r6 - u) / 12.0;
         }},
        {"cauchy", [](double x) { return 0.5 + std::atan(x) / std::numbers::pi; }},
        {"gg:0.5", gg_cdf(0.5)},
        {"gg:4", gg_cdf(4.0)},
        {"beta:2:5", [](double x) { return boost::math::ibeta(2.0, 5.0, std::clamp(x + 2.0 / 7.0, 0.0, 1.0)); }},
    };
    constexpr std::size_t n = 20000;
    for (const auto& c : cases) {
        const auto x = sample(DistributionSpec::parse(c.spec), n, 99);
        EXPECT_LT(ks_statistic(x, c.cdf), ks_critical(n)) << c.spec;
    }
}

TEST(Sampling, StandardisedLawsHaveUnitVariance) {
    for (const char* s : {"gaussian", "laplace", "uniform", "arcsine", "triangular", "gg:1.5", "gg:4"}) {
        const auto d = DistributionSpec::parse(s);
        ASSERT_TRUE(d.standardized());
        const auto x = sample(d, 200000, 7);
        EXPECT_NEAR(sample_var(x), 1.0, 0.02) << s;
    }
    const auto beta = DistributionSpec::beta(2, 5);
    EXPECT_NEAR(sample_var(sample(beta, 200000, 7)), beta.variance(), 0.01 * beta.variance());
}

TEST(Sampling, DeterministicPerSeed) {
    for (const char* s : {"laplace", "gg:0.5", "beta:2:5", "gaussian"}) {
        const auto d = DistributionSpec::parse(s);
        EXPECT_EQ(sample(d, 257, 42), sample(d, 257, 42));
        EXPECT_NE(sample(d, 257, 42), sample(d, 257, 43));
    }
    EXPECT_THROW(sample(DistributionSpec::laplace(), 0, 1), invalid_argument);
}

TEST(Density, IntegratesToOne) {
    for (const char* s : {"gaussian", "laplace", "uniform", "arcsine", "triangular", "gg:0.5", "gg:4",
                          "beta:2:5", "beta:0.5:0.5", "cauchy"}) {
        const auto d = DistributionSpec::parse(s);
        EXPECT_NEAR(quadrature_moment(d.density(), 0.0, d.support()), 1.0, 1e-8) << s;
    }
}

TEST(Shape, EntropyCoefficientsHaveClosedForms) {
    const double e = std::numbers::e;
    EXPECT_NEAR(*shape_summary(DistributionSpec::gaussian()).entropy_coeff,
                std::sqrt(2 * std::numbers::pi * e) / 2, 1e-9);
    EXPECT_NEAR(*shape_summary(DistributionSpec::laplace()).entropy_coeff, e / std::numbers::sqrt2, 1e-9);
    EXPECT_NEAR(*shape_summary(DistributionSpec::uniform()).entropy_coeff, std::numbers::sqrt3, 1e-9);
    EXPECT_NEAR(*shape_summary(DistributionSpec::arcsine()).entropy_coeff,
                std::numbers::pi / (2 * std::numbers::sqrt2), 1e-8);
    EXPECT_NEAR(*shape_summary(DistributionSpec::triangular()).entropy_coeff, std::sqrt(6 * e) / 2, 1e-9);
}

TEST(Shape, GaussianMaximisesEntropyCoefficient) {
    const double kg = *shape_summary(DistributionSpec::gaussian()).entropy_coeff;
    for (const char* s : {"laplace", "uniform", "arcsine", "triangular", "gg:0.5", "gg:4", "beta:2:5"}) {
        EXPECT_LT(*shape_summary(DistributionSpec::parse(s)).entropy_coeff, kg) << s;
    }
}

TEST(Shape, KurtosisAndSkewness) {
    EXPECT_NEAR(gg_kurtosis(2.0), 0.0, 1e-12);
    EXPECT_NEAR(gg_kurtosis(1.0), 3.0, 1e-12);
    const auto s = shape_summary(DistributionSpec::beta(2, 5));
    // Beta(2,5): skewness 2(b-a)sqrt(a+b+1)/((a+b+2)sqrt(ab))
    EXPECT_NEAR(*s.gamma3, 2.0 * 3.0 * std::sqrt(8.0) / (9.0 * std::sqrt(10.0)), 1e-12);
    // cross-check against quadrature central moments
    const auto d = DistributionSpec::beta(2, 5);
    const double var = d.variance();
    const double m3 = theoretical_signed_moment(d, 3.0);
    const double m4 = theoretical_abs_moment(d, 4.0);
    EXPECT_NEAR(*s.gamma3, m3 / std::pow(var, 1.5), 1e-8);
    EXPECT_NEAR(*s.gamma4, m4 / (var * var) - 3.0, 1e-8);
    EXPECT_NEAR(*shape_summary(DistributionSpec::laplace()).contrexcess, 1 / std::sqrt(6.0), 1e-12);
}

TEST(Shape, CauchyHasNoEntropyCoefficient) {
    const auto s = shape_summary(DistributionSpec::cauchy());
    EXPECT_FALSE(s.entropy_coeff.has_value());
    EXPECT_FALSE(s.contrexcess.has_value());
    ASSERT_TRUE(s.entropy.has_value());
    EXPECT_NEAR(*s.entropy, std::log(4 * std::numbers::pi), 1e-8);
}

TEST(Shape, GeneralizedGaussianKurtosis) {
    // Gamma(10) Gamma(2) / Gamma(6)^2 = 25.2 is the raw ratio; the excess is 22.2.
    EXPECT_NEAR(gg_kurtosis(0.5) + 3.0, 25.2, 1e-9);
    EXPECT_NEAR(gg_kurtosis(1.0), 3.0, 1e-12);
    EXPECT_NEAR(gg_kurtosis(2.0), 0.0, 1e-12);
    EXPECT_NEAR(*shape_summary(DistributionSpec::gg(1.0)).gamma4, 3.0, 1e-12);
}

TEST(Shape, GeneralizedGaussianEntropyCurve) {
    const double kmax = std::sqrt(2 * std::numbers::pi * std::numbers::e) / 2;
    double prev = *shape_summary(DistributionSpec::gg(0.5)).entropy_coeff;
    for (double beta = 0.505; beta <= 8.0; beta += 0.005) {
        const double k = *shape_summary(DistributionSpec::gg(beta)).entropy_coeff;
        EXPECT_LE(k, kmax + 1e-9);
        EXPECT_LT(std::abs(k - prev), 0.02) << beta;
        prev = k;
    }
    EXPECT_NEAR(*shape_summary(DistributionSpec::gg(1.0)).entropy_coeff,
                *shape_summary(DistributionSpec::laplace()).entropy_coeff, 1e-9);
    EXPECT_NEAR(*shape_summary(DistributionSpec::gg(2.0)).entropy_coeff, kmax, 1e-9);
    // Closed form for unit variance; approaches sqrt(3) only like O(1/b).
    auto k_gg = [](double b) {
        return std::exp(1.0 / b) * std::tgamma(1.0 + 1.0 / b) * std::sqrt(std::tgamma(1.0 / b) / std::tgamma(3.0 / b));
    };
    for (double b : {0.5, 1.5, 4.0, 64.0, 256.0}) {
        EXPECT_NEAR(*shape_summary(DistributionSpec::gg(b)).entropy_coeff, k_gg(b), 1e-9) << b;
    }
    EXPECT_NEAR(k_gg(64.0), 1.7583, 1e-4);
    EXPECT_NEAR(k_gg(256.0), std::sqrt(3.0), 0.01);
}

TEST(Sampling, GgTwoIsGaussian) {
    const auto x = sample(DistributionSpec::gg(2.0), 10000, 12);
    EXPECT_LT(ks_statistic(x, [](double v) { return 0.5 * std::erfc(-v / std::numbers::sqrt2); }),
              1.63 / std::sqrt(1e4));
    const auto g = sample(DistributionSpec::gaussian(), 100000, 13);
    double m = 0;
    for (double v : g) m += v;
    EXPECT_LT(std::abs(m / g.size()), 3 / std::sqrt(1e5));
}
