#pragma once

#include <cmath>
#include <string>

#include "fadekit/core.hpp"

namespace fadekit {

namespace limits {
/// Below this kappa the signed-weight (m < mu) construction cancels too hard;
/// callers must fall back to the direct-series evaluator.
inline constexpr double kappa_min = 1e-3;
/// Cap on the integer fading parameters.
inline constexpr int max_fading_order = 2000;
}  // namespace limits

/// Parameters of the kappa-mu shadowed power/SNR distribution with integer
/// fading orders: mean SNR gamma_bar, LOS-to-scatter ratio kappa, number of
/// clusters mu, and LOS fluctuation severity m.
struct ShadowedParams {
    double gamma_bar;
    double kappa;
    int mu;
    int m;
};

/// Real-parameter superset accepted by the direct-series evaluators.
struct RealShadowedParams {
    double gamma_bar;
    double kappa;
    double mu;
    double m;
};

/// The two Gamma scales behind the rational MGF: delta1 for the scatter-only
/// factor, delta2 for the shadowed-LOS factor. 0 < delta1 < delta2.
struct DeltaPair {
    double delta1;
    double delta2;
};

inline void validate(const ShadowedParams& p) {
    if (!(p.gamma_bar > 0.0) || !std::isfinite(p.gamma_bar))
        throw InvalidParamsError("gamma_bar must be positive and finite");
    if (!(p.kappa > 0.0) || !std::isfinite(p.kappa))
        throw InvalidParamsError("kappa must be positive and finite");
    if (p.mu < 1 || p.mu > limits::max_fading_order)
        throw InvalidParamsError("mu must be an integer in [1, " +
                                 std::to_string(limits::max_fading_order) + "]");
    if (p.m < 1 || p.m > limits::max_fading_order)
        throw InvalidParamsError("m must be an integer in [1, " +
                                 std::to_string(limits::max_fading_order) + "]");
}

inline void validate(const RealShadowedParams& p) {
    if (!(p.gamma_bar > 0.0) || !std::isfinite(p.gamma_bar))
        throw InvalidParamsError("gamma_bar must be positive and finite");
    if (!(p.kappa > 0.0) || !std::isfinite(p.kappa))
        throw InvalidParamsError("kappa must be positive and finite");
    if (!(p.mu > 0.0) || !std::isfinite(p.mu))
        throw InvalidParamsError("mu must be positive and finite");
    if (!(p.m > 0.0) || !std::isfinite(p.m))
        throw InvalidParamsError("m must be positive and finite");
}

inline DeltaPair delta_pair(const ShadowedParams& p) {
    validate(p);
    const double d1 = p.gamma_bar / (p.mu * (1.0 + p.kappa));
    const double d2 = (p.mu * p.kappa + p.m) / p.m * d1;
    return {d1, d2};
}

}  // namespace fadekit
