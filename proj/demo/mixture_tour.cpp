// Minimal tour of the library: build a model, evaluate its statistics, draw
// variates, and check the draw against the closed-form CDF.

#include <algorithm>
#include <cstdio>

#include "fadekit/fadekit.hpp"

int main() {
    const fadekit::ShadowedParams prm{/*gamma_bar=*/1.0, /*kappa=*/5.0, /*mu=*/3, /*m=*/2};
    const fadekit::MixtureModel model = fadekit::build_mixture(prm);

    std::printf("regime: %s, %zu Gamma components\n",
                model.regime == fadekit::Regime::Proper ? "proper" : "improper",
                model.components.size());
    for (const auto& comp : model.components)
        std::printf("  weight %+.6f  shape %d  scale %.6f\n", comp.weight, comp.shape,
                    comp.scale);

    std::printf("pdf(0.8)  = %.12f\n", fadekit::pdf(model, 0.8));
    std::printf("cdf(0.8)  = %.12f\n", fadekit::cdf(model, 0.8));
    std::printf("mean      = %.12f\n", fadekit::moment(model, 1));
    std::printf("capacity  = %.12f bps/Hz\n", fadekit::shadowed_capacity(model));

    fadekit::RngState rng(2026);
    auto draws = fadekit::sample(prm, 20000, rng);
    std::sort(draws.begin(), draws.end());
    const double d =
        fadekit::ks_statistic(draws, [&](double x) { return fadekit::cdf(model, x); });
    std::printf("KS(20000 draws vs cdf) = %.5f\n", d);
    return 0;
}
