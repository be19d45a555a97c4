#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fadekit/core.hpp"
#include "fadekit/params.hpp"

namespace fadekit {

/// Deterministic 64-bit generator (splitmix64). The same seed produces the
/// same stream on every platform; sub-streams for parallel shards are derived
/// with split(). Not shareable across threads - hand each worker its own split.
struct RngState {
    std::uint64_t seed;
    std::uint64_t state;
    std::string algorithm = "splitmix64";

    explicit RngState(std::uint64_t seed_value) : seed(seed_value), state(seed_value) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() {
        state += 0x9E3779B97F4A7C15ULL;
        return mix(state);
    }

    /// Uniform draw strictly inside (0, 1); safe to pass to log().
    double next_open01() {
        return (double(next_u64() >> 12) + 0.5) * 0x1p-52;
    }

    /// Independent sub-stream for shard i, derived from the original seed.
    RngState split(std::uint64_t i) const {
        return RngState(mix(seed + (i + 1) * 0x9E3779B97F4A7C15ULL));
    }
};

namespace detail {

/// Exact Erlang draw: -scale * sum of shape exponential(1) variates.
inline double draw_erlang(int shape, double scale, RngState& rng) {
    double acc = 0.0;
    for (int i = 0; i < shape; ++i) acc += std::log(rng.next_open01());
    return -scale * acc;
}

/// Binomial(n, p) index by inverse transform, enumerated outward from the
/// mode so the starting mass never underflows however large n is.
inline int draw_binomial_index(int n, double p, RngState& rng) {
    if (n == 0) return 0;
    const double u = rng.next_open01();
    const double q = 1.0 - p;
    const int j0 = std::min(n, std::max(0, int((double(n) + 1.0) * p)));
    const double pm0 = std::exp(log_binomial(n, j0) + double(j0) * std::log(p) +
                                double(n - j0) * std::log(q));
    double acc = pm0;
    if (u <= acc) return j0;
    double pm_up = pm0, pm_down = pm0;
    int hi = j0, lo = j0;
    while (hi < n || lo > 0) {
        if (hi < n) {
            pm_up *= double(n - hi) / double(hi + 1) * (p / q);
            ++hi;
            acc += pm_up;
            if (u <= acc) return hi;
        }
        if (lo > 0) {
            pm_down *= double(lo) / double(n - lo + 1) * (q / p);
            --lo;
            acc += pm_down;
            if (u <= acc) return lo;
        }
    }
    return j0;  // u fell into the rounding residual of the total mass
}

}  // namespace detail

/// How a draw is decomposed. Auto picks ComponentMixture for m >= mu and
/// GammaSum for m < mu; the other mode is kept as a cross-check.
enum class SampleMethod { Auto, ComponentMixture, GammaSum };

/// n exact draws from the kappa-mu shadowed distribution with integer (mu, m).
///
/// m < mu: each draw is Gamma(mu - m, delta1) + Gamma(m, delta2).
/// m >= mu: a component index j is drawn with the binomial weight B_j, then
/// Gamma(m - j, delta2); the GammaSum cross-check instead thins m - mu
/// exponential terms onto a Gamma(mu, delta2) core, which realises the same
/// law through the factored MGF.
inline std::vector<double> sample(const ShadowedParams& params, std::size_t n,
                                  RngState& rng, SampleMethod method = SampleMethod::Auto) {
    validate(params);
    if (n < 1) throw InvalidParamsError("sample: requires n >= 1");
    const DeltaPair d = delta_pair(params);
    const bool proper = params.m >= params.mu;
    if (method == SampleMethod::Auto)
        method = proper ? SampleMethod::ComponentMixture : SampleMethod::GammaSum;
    if (method == SampleMethod::ComponentMixture && !proper)
        throw RegimeMismatchError("sample: no component selection exists for m < mu");

    std::vector<double> out;
    out.reserve(n);
    const double p = params.m / (params.mu * params.kappa + params.m);
    if (method == SampleMethod::ComponentMixture) {
        const int big_m = params.m - params.mu;
        for (std::size_t i = 0; i < n; ++i) {
            const int j = detail::draw_binomial_index(big_m, p, rng);
            out.push_back(detail::draw_erlang(params.m - j, d.delta2, rng));
        }
    } else if (proper) {
        // Bernoulli-thinned construction for m >= mu
        const int extra = params.m - params.mu;
        for (std::size_t i = 0; i < n; ++i) {
            double v = detail::draw_erlang(params.mu, d.delta2, rng);
            for (int t = 0; t < extra; ++t)
                if (rng.next_open01() > p) v += detail::draw_erlang(1, d.delta2, rng);
            out.push_back(v);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double g1 = detail::draw_erlang(params.mu - params.m, d.delta1, rng);
            const double g2 = detail::draw_erlang(params.m, d.delta2, rng);
            out.push_back(g1 + g2);
        }
    }
    return out;
}

/// Histogram of the component indices chosen by the mixture sampler over n
/// draws; defined only for m >= mu.
inline std::vector<std::uint64_t> sample_component_counts(const ShadowedParams& params,
                                                          std::size_t n, RngState& rng) {
    validate(params);
    if (params.m < params.mu)
        throw RegimeMismatchError(
            "sample_component_counts: no component selection exists for m < mu");
    if (n < 1) throw InvalidParamsError("sample_component_counts: requires n >= 1");
    const int big_m = params.m - params.mu;
    const double p = params.m / (params.mu * params.kappa + params.m);
    std::vector<std::uint64_t> counts(std::size_t(big_m) + 1, 0);
    for (std::size_t i = 0; i < n; ++i)
        ++counts[std::size_t(detail::draw_binomial_index(big_m, p, rng))];
    return counts;
}

}  // namespace fadekit
