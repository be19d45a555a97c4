#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fadekit/mixture.hpp"
#include "fadekit/quadrature.hpp"
#include "fadekit/reference.hpp"

using namespace fadekit;
using Catch::Approx;

namespace {

// Test-only oracle: the split two-block presentation of the mixture PDF
// (partial-fraction coefficients written with p = m/(mu k + m), q = 1 - p and
// the component means), evaluated directly. Small parameters only.
double split_form_pdf(const ShadowedParams& prm, double x) {
    const DeltaPair d = delta_pair(prm);
    const double p = prm.m / (prm.mu * prm.kappa + prm.m);
    const double q = 1.0 - p;
    auto f_k = [](double mean, int k, double x_at) {
        const double rate = double(k) / mean;
        double fact = 1.0;
        for (int i = 2; i < k; ++i) fact *= double(i);
        return std::pow(rate, k) * std::pow(x_at, k - 1) * std::exp(-x_at * rate) / fact;
    };
    auto binom = [](int n, int k) {
        double b = 1.0;
        for (int i = 0; i < k; ++i) b = b * double(n - i) / double(i + 1);
        return b;
    };
    double sum = 0.0;
    if (prm.m < prm.mu) {
        for (int j = 1; j <= prm.mu - prm.m; ++j) {
            const double a1 = (prm.m % 2 == 0 ? 1.0 : -1.0) * binom(prm.m + j - 2, j - 1) *
                              std::pow(p, prm.m) * std::pow(q, -prm.m - j + 1);
            const int shape = prm.mu - prm.m - j + 1;
            sum += a1 * f_k(d.delta1 * shape, shape, x);
        }
        for (int j = 1; j <= prm.m; ++j) {
            const double a2 = (j % 2 == 1 ? 1.0 : -1.0) *
                              binom(prm.mu - prm.m + j - 2, j - 1) * std::pow(p, j - 1) *
                              std::pow(q, prm.m - prm.mu - j + 1);
            const int shape = prm.m - j + 1;
            sum += a2 * f_k(d.delta2 * shape, shape, x);
        }
    } else {
        for (int j = 0; j <= prm.m - prm.mu; ++j) {
            const double b = binom(prm.m - prm.mu, j) * std::pow(p, j) *
                             std::pow(q, prm.m - prm.mu - j);
            const int shape = prm.m - j;
            sum += b * f_k(d.delta2 * shape, shape, x);
        }
    }
    return sum;
}

}  // namespace

TEST_CASE("build_mixture collapses to a single Gamma at m = mu") {
    const MixtureModel model = build_mixture({1.0, 3.0, 2, 2});
    REQUIRE(model.components.size() == 1);
    CHECK(model.regime == Regime::Proper);
    CHECK(model.components[0].weight == Approx(1.0).epsilon(1e-15));
    CHECK(model.components[0].shape == 2);
    CHECK(model.components[0].scale == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("build_mixture proper-regime example") {
    const MixtureModel model = build_mixture({1.0, 1.0, 1, 2});
    REQUIRE(model.components.size() == 2);
    CHECK(model.components[0].weight == Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(model.components[0].shape == 2);
    CHECK(model.components[0].scale == Approx(0.75).epsilon(1e-15));
    CHECK(model.components[1].weight == Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(model.components[1].shape == 1);
    CHECK(model.components[1].scale == Approx(0.75).epsilon(1e-15));
}

TEST_CASE("build_mixture improper-regime example") {
    const MixtureModel model = build_mixture({1.0, 5.0, 3, 2});
    REQUIRE(model.components.size() == 3);  // the zero-weight entry is dropped
    CHECK(model.regime == Regime::Improper);
    CHECK(model.components[0].weight == Approx(4.0 / 225.0).epsilon(1e-13));
    CHECK(model.components[0].shape == 1);
    CHECK(model.components[0].scale == Approx(1.0 / 18.0).epsilon(1e-15));
    CHECK(model.components[1].weight == Approx(17.0 / 15.0).epsilon(1e-13));
    CHECK(model.components[1].shape == 2);
    CHECK(model.components[1].scale == Approx(17.0 / 36.0).epsilon(1e-15));
    CHECK(model.components[2].weight == Approx(-34.0 / 225.0).epsilon(1e-13));
    CHECK(model.components[2].shape == 1);
    double wsum = 0.0;
    for (const auto& c : model.components) wsum += c.weight;
    CHECK(wsum == Approx(1.0).margin(1e-12));
}

TEST_CASE("build_mixture rejects invalid parameters") {
    CHECK_THROWS_AS(build_mixture({0.0, 1.0, 1, 1}), InvalidParamsError);
    CHECK_THROWS_AS(build_mixture({1.0, 0.0, 1, 1}), InvalidParamsError);
    CHECK_THROWS_AS(build_mixture({1.0, 1.0, 0, 1}), InvalidParamsError);
    CHECK_THROWS_AS(build_mixture({1.0, 1.0, 1, 0}), InvalidParamsError);
    CHECK_THROWS_AS(build_mixture({1.0, 1.0, 2001, 1}), InvalidParamsError);
    CHECK_THROWS_AS(build_mixture({1.0, 5e-4, 3, 2}), KappaTooSmallError);
    CHECK_NOTHROW(build_mixture({1.0, 5e-4, 2, 3}));  // proper regime has no kappa floor
    CHECK_NOTHROW(build_mixture({1.0, 1e-3, 3, 2}));  // boundary builds
}

TEST_CASE("pdf reference points") {
    const MixtureModel model = build_mixture({1.0, 3.0, 2, 2});
    CHECK(pdf(model, 1.0) == Approx(4.0 * std::exp(-2.0)).epsilon(1e-14));
    CHECK(pdf(model, 0.0) == 0.0);
    CHECK_THROWS_AS(pdf(model, -1.0), NegativeInputError);
    // mu = 1 keeps a finite density at the origin: the shape-1 components
    const MixtureModel mu1 = build_mixture({1.0, 1.0, 1, 2});
    CHECK(pdf(mu1, 0.0) == Approx((2.0 / 3.0) / 0.75).epsilon(1e-13));
    // improper point checked against the direct-series oracle
    const MixtureModel imp = build_mixture({1.0, 5.0, 3, 2});
    CHECK(pdf(imp, 0.8) ==
          Approx(pdf_direct({1.0, 5.0, 3.0, 2.0}, 0.8)).epsilon(1e-8));
}

TEST_CASE("cdf reference points") {
    const MixtureModel model = build_mixture({1.0, 3.0, 2, 2});
    CHECK(cdf(model, 0.0) == 0.0);
    CHECK(cdf(model, 50.0) == Approx(1.0).margin(1e-12));
    CHECK_THROWS_AS(cdf(model, -0.5), NegativeInputError);
    const MixtureModel mu1 = build_mixture({1.0, 1.0, 1, 2});
    const double q = quad_cdf([&](double t) { return pdf(mu1, t); }, 1.0);
    CHECK(cdf(mu1, 1.0) == Approx(q).epsilon(1e-8));
}

TEST_CASE("mgf reference points") {
    CHECK(mgf_rational({1.0, 3.0, 2, 2}, 0.0) == 1.0);
    CHECK(mgf_rational({1.0, 3.0, 2, 2}, -1.0) == Approx(4.0 / 9.0).epsilon(1e-14));
    CHECK_THROWS_AS(mgf_rational({1.0, 3.0, 2, 2}, 2.1), OutOfRegionError);
    const MixtureModel m12 = build_mixture({1.0, 1.0, 1, 2});
    CHECK(mgf_mixture(m12, 0.0) == Approx(1.0).epsilon(1e-14));
    CHECK(mgf_mixture(m12, -1.0) == Approx(24.0 / 49.0).epsilon(1e-13));
    CHECK_THROWS_AS(mgf_mixture(m12, 1.4), OutOfRegionError);
    const MixtureModel big = build_mixture({2.0, 5.0, 4, 1});
    CHECK(mgf_mixture(big, -0.3) ==
          Approx(mgf_rational({2.0, 5.0, 4, 1}, -0.3)).epsilon(1e-12));
}

TEST_CASE("moment reference points") {
    const MixtureModel model = build_mixture({1.0, 3.0, 2, 2});
    CHECK(moment(model, 1) == Approx(1.0).epsilon(1e-12));
    CHECK(moment(model, 2) == Approx(1.5).epsilon(1e-12));
    CHECK_THROWS_AS(moment(model, 0), InvalidParamsError);
    // central second difference of the MGF at s = 0
    const MixtureModel imp = build_mixture({1.0, 5.0, 3, 2});
    const double h = 2e-5;
    const ShadowedParams prm{1.0, 5.0, 3, 2};
    const double d2 =
        (mgf_rational(prm, h) - 2.0 * mgf_rational(prm, 0.0) + mgf_rational(prm, -h)) /
        (h * h);
    CHECK(moment(imp, 2) == Approx(d2).epsilon(1e-6));
}

TEST_CASE("weight identities across the sweep") {
    for (double kappa : {0.5, 1.0, 5.0, 10.0})
        for (int mu : {1, 2, 3, 4, 5, 6})
            for (int m : {1, 2, 3, 4, 5, 6, 7, 8}) {
                const MixtureModel model = build_mixture({1.0, kappa, mu, m});
                CompensatedSum wsum, mean;
                for (const auto& c : model.components) {
                    wsum.add(c.weight);
                    mean.add(c.weight * double(c.shape) * c.scale);
                }
                CHECK(std::abs(wsum.value() - 1.0) < 1e-12);
                CHECK(std::abs(mean.value() - 1.0) < 1e-10);
                if (m >= mu) {
                    // proper weights are binomial probabilities, closed form
                    const double p = m / (mu * kappa + m);
                    const int big_m = m - mu;
                    for (int i = 0; i <= big_m; ++i) {
                        double b = 1.0;
                        for (int t = 0; t < i; ++t)
                            b = b * double(big_m - t) / double(t + 1);
                        b *= std::pow(p, i) * std::pow(1.0 - p, big_m - i);
                        CHECK(model.components[std::size_t(i)].weight ==
                              Approx(b).epsilon(1e-13));
                        CHECK(model.components[std::size_t(i)].weight >= 0.0);
                    }
                }
            }
}

TEST_CASE("pdf is nonnegative and matches the direct series across the sweep") {
    const auto grid = log_grid(1e-6, 50.0, 120);
    double worst = 0.0;
    for (double kappa : {0.5, 1.0, 5.0, 10.0})
        for (int mu : {1, 2, 3, 4, 5, 6})
            for (int m : {1, 2, 3, 4, 5, 6, 7, 8}) {
                const MixtureModel model = build_mixture({1.0, kappa, mu, m});
                const RealShadowedParams rp{1.0, kappa, double(mu), double(m)};
                for (double x : grid) {
                    const double v = pdf(model, x);
                    REQUIRE(v >= 0.0);
                    const double d = pdf_direct(rp, x);
                    if (d > 1e-300)
                        worst = std::max(worst, std::abs(v - d) / d);
                }
            }
    CHECK(worst < 1e-8);
}

TEST_CASE("pdf integrates to one and cdf matches its integral") {
    for (double kappa : {0.5, 5.0})
        for (int mu : {1, 3, 6})
            for (int m : {1, 2, 8}) {
                const MixtureModel model = build_mixture({1.0, kappa, mu, m});
                double cutoff = 0.0;
                for (const auto& c : model.components)
                    cutoff = std::max(cutoff, gamma_tail_cutoff(c.shape, c.scale));
                const double mass =
                    integrate([&](double t) { return pdf(model, t); }, 0.0, cutoff,
                              {1e-12, 1e-11, 20000});
                CHECK(mass == Approx(1.0).margin(1e-8));
                for (double x : {0.3, 2.0}) {
                    const double q = quad_cdf([&](double t) { return pdf(model, t); }, x);
                    CHECK(cdf(model, x) == Approx(q).margin(1e-8));
                }
            }
}

TEST_CASE("cdf is nondecreasing and within [0, 1]") {
    const auto grid = log_grid(1e-6, 50.0, 300);
    for (double kappa : {0.7, 6.0})
        for (int mu : {2, 5})
            for (int m : {1, 3, 9}) {
                const MixtureModel model = build_mixture({1.0, kappa, mu, m});
                double prev = 0.0;
                for (double x : grid) {
                    const double f = cdf(model, x);
                    REQUIRE(f >= 0.0);
                    REQUIRE(f <= 1.0);
                    REQUIRE(f >= prev - 1e-12);
                    prev = f;
                }
            }
}

TEST_CASE("mixture and rational MGF agree on the negative axis") {
    for (double kappa : {0.5, 1.0, 5.0, 10.0})
        for (int mu : {1, 2, 3, 6})
            for (int m : {1, 2, 6}) {
                const ShadowedParams prm{1.0, kappa, mu, m};
                const MixtureModel model = build_mixture(prm);
                double worst = 0.0;
                for (double s : linear_grid(-20.0, 0.0, 50)) {
                    const double r = mgf_rational(prm, s);
                    worst = std::max(worst, std::abs(mgf_mixture(model, s) - r) / r);
                }
                CHECK(worst < 1e-10);
            }
}

TEST_CASE("unified evaluation equals the split two-block presentation") {
    const auto grid = log_grid(1e-3, 20.0, 40);
    for (const ShadowedParams prm :
         {ShadowedParams{1.0, 5.0, 3, 2}, ShadowedParams{1.0, 0.8, 5, 2},
          ShadowedParams{2.0, 2.0, 4, 7}, ShadowedParams{1.0, 10.0, 6, 1}}) {
        const MixtureModel model = build_mixture(prm);
        for (double x : grid) {
            const double split = split_form_pdf(prm, x * prm.gamma_bar);
            const double unified = pdf(model, x * prm.gamma_bar);
            CHECK(unified == Approx(split).margin(1e-12).epsilon(1e-12));
        }
    }
}

TEST_CASE("near-origin cdf recovers the diversity order") {
    for (double kappa : {0.5, 1.0, 5.0, 10.0})
        for (int mu : {1, 2, 3, 6})
            for (int m : {1, 2, 6}) {
                const MixtureModel model = build_mixture({1.0, kappa, mu, m});
                const double f_lo = cdf(model, 1e-7);
                const double f_hi = cdf(model, 1e-6);
                const double slope = (std::log(f_hi) - std::log(f_lo)) / std::log(10.0);
                CHECK(std::abs(slope - double(mu)) < 0.05);
            }
}

TEST_CASE("delta pair is strictly ordered") {
    const DeltaPair d = delta_pair({1.0, 3.0, 2, 2});
    CHECK(d.delta1 > 0.0);
    CHECK(d.delta1 < d.delta2);
    const DeltaPair tiny = delta_pair({1.0, 1e-3, 2, 5});
    CHECK(tiny.delta1 < tiny.delta2);
}

TEST_CASE("large fading orders stay consistent with the direct series") {
    {
        const MixtureModel model = build_mixture({2.5, 2.0, 4, 2000});
        const double q = quad_cdf(
            [](double t) { return pdf_direct({2.5, 2.0, 4.0, 2000.0}, t); }, 2.5,
            {1e-12, 1e-11, 20000});
        CHECK(cdf(model, 2.5) == Approx(q).margin(1e-8));
    }
    {
        const MixtureModel model = build_mixture({1.0, 5.0, 500, 3});
        CHECK(model.regime == Regime::Improper);
        CHECK(pdf(model, 1.0) ==
              Approx(pdf_direct({1.0, 5.0, 500.0, 3.0}, 1.0)).epsilon(1e-8));
        CHECK(moment(model, 1) == Approx(1.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(build_mixture({1.0, 1.0, 1, 2001}), InvalidParamsError);
}

TEST_CASE("random-parameter property sweep") {
    // tolerances follow the cancellation amplitude sum |C_i|: each weight
    // carries ~|C_i| eps of absolute rounding from the log-domain route
    std::mt19937 gen(20260809);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int rejected = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const double kappa = std::pow(10.0, -0.52 + 1.82 * u01(gen));  // [0.3, 20]
        const int mu = 1 + int(u01(gen) * 12.0);
        const int m = 1 + int(u01(gen) * 12.0);
        const double gbar = std::pow(10.0, -2.0 + 4.0 * u01(gen));
        const double x_frac = 0.2 + 3.0 * u01(gen);
        const ShadowedParams prm{gbar, kappa, mu, m};
        MixtureModel model;
        try {
            model = build_mixture(prm);
        } catch (const InternalConsistencyError&) {
            ++rejected;  // cancellation beyond the build gate; rare by design
            continue;
        }
        double amp = 0.0;
        CompensatedSum wsum;
        for (const auto& c : model.components) {
            wsum.add(c.weight);
            amp += std::abs(c.weight);
        }
        CHECK(std::abs(wsum.value() - 1.0) < 1e-12 + amp * 1e-15);
        CHECK(std::abs(moment(model, 1) - gbar) < gbar * (1e-12 + amp * 1e-14));
        CHECK(cdf(model, 50.0 * gbar) == Approx(1.0).margin(1e-9));
        const double s = -3.0 / gbar;
        const double rational = mgf_rational(prm, s);
        CHECK(std::abs(mgf_mixture(model, s) - rational) <
              rational * 1e-10 + amp * 1e-15);
        const double x = gbar * x_frac;
        CHECK(pdf(model, x) ==
              Approx(pdf_direct({gbar, kappa, double(mu), double(m)}, x)).epsilon(1e-8));
    }
    CHECK(rejected < 30);
}
