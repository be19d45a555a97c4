#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "fadekit/core.hpp"
#include "fadekit/params.hpp"
#include "fadekit/special_functions.hpp"

namespace fadekit {

/// Proper: m >= mu, a convex combination with binomial weights.
/// Improper: m < mu, a signed linear combination of two Gamma-scale blocks.
enum class Regime { Proper, Improper };

/// One mixture term: weight * Gamma density with integer shape and scale,
/// f(x) = x^{shape-1} e^{-x/scale} / ((shape-1)! scale^shape). The weight may
/// be negative only in the improper regime.
struct GammaComponent {
    double weight;
    int shape;
    double scale;
};

/// Finite Gamma-mixture representation of the kappa-mu shadowed distribution
/// with integer fading parameters. Immutable once built; every operation on it
/// is a pure function.
struct MixtureModel {
    ShadowedParams params;
    Regime regime = Regime::Proper;
    std::vector<GammaComponent> components;

    // evaluation tables, filled by build_mixture
    DeltaPair delta{};
    double clamp_tol = 0.0;   // negative pdf values above -clamp_tol clamp to 0
    double x_near = 0.0;      // below this, improper models use the origin series
    std::vector<double> origin_coeff;  // c_j of pdf = (1/d1) sum_j c_j u^{mu-1+j}, u = x/d1
    std::vector<std::size_t> eval_order;  // component indices, |weight| descending

    // weights grouped by scale and indexed by shape-1, for O(max shape) evaluation
    struct ScaleGroup {
        double scale;
        std::vector<double> weight_by_shape;
    };
    std::vector<ScaleGroup> groups;
};

namespace detail {

struct SignedLog {
    double sign;
    double log_mag;
};

inline constexpr std::size_t origin_series_terms = 80;

/// Near-origin power-series coefficients for the improper regime. The plain
/// component sum loses all relative accuracy as x -> 0 because terms of order
/// x^0 .. x^{mu-2} cancel exactly; here those orders are removed analytically
/// and the surviving coefficients are accumulated once at build time.
inline std::vector<double> improper_origin_coefficients(
    const std::vector<GammaComponent>& comps,
    const std::vector<SignedLog>& logs, int mu, double d1) {
    std::vector<CompensatedSum> acc(origin_series_terms);
    const int n_lo = mu - 1;
    const int n_hi = n_lo + int(origin_series_terms) - 1;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const int k = comps[i].shape;
        const double t = d1 / comps[i].scale;
        // T(n) at n = k-1 is C * t^k / (k-1)!; each step multiplies by -t/(n-k+2)
        double term = logs[i].sign *
                      std::exp(logs[i].log_mag + double(k) * std::log(t) -
                               std::lgamma(double(k)));
        for (int n = k - 1; n <= n_hi; ++n) {
            if (n >= n_lo) acc[std::size_t(n - n_lo)].add(term);
            term *= -t / double(n - k + 2);
        }
    }
    std::vector<double> coeff(origin_series_terms);
    for (std::size_t j = 0; j < origin_series_terms; ++j) coeff[j] = acc[j].value();
    return coeff;
}

inline double gamma_peak_density(int shape, double scale) {
    if (shape == 1) return 1.0 / scale;
    const double k = double(shape - 1);
    return std::exp(k * std::log(k) - k - std::lgamma(k + 1.0)) / scale;
}

}  // namespace detail

/// Builds the exact finite Gamma-mixture for integer (mu, m). Weights are
/// assembled as (sign, log magnitude) pairs from log-factorials and only
/// exponentiated at the end; the construction is rejected if the weights do
/// not sum to 1 within 1e-9.
inline MixtureModel build_mixture(const ShadowedParams& params) {
    validate(params);
    MixtureModel model;
    model.params = params;
    model.delta = delta_pair(params);
    const double d1 = model.delta.delta1;
    const double d2 = model.delta.delta2;
    const int mu = params.mu;
    const int m = params.m;
    const double p = m / (params.mu * params.kappa + m);
    const double q = params.mu * params.kappa / (params.mu * params.kappa + m);
    const double log_p = std::log(p);
    const double log_q = std::log(q);

    std::vector<detail::SignedLog> logs;
    if (m >= mu) {
        model.regime = Regime::Proper;
        const int big_m = m - mu;
        for (int i = 0; i <= big_m; ++i) {
            const double lw =
                log_binomial(big_m, i) + double(i) * log_p + double(big_m - i) * log_q;
            logs.push_back({1.0, lw});
            model.components.push_back({0.0, m - i, d2});
        }
    } else {
        model.regime = Regime::Improper;
        if (params.kappa < limits::kappa_min)
            throw KappaTooSmallError(
                "build_mixture: kappa below the cancellation floor for m < mu");
        // primary form: partial-fraction coefficients with the deltas
        // substituted; the zero-weight i = 0 entry is never materialized.
        // gap = d2 - d1 computed analytically as d1*mu*kappa/m
        const double log_d1 = std::log(d1);
        const double log_d2 = std::log(d2);
        const double log_gap = log_d1 + std::log(params.mu * params.kappa / m);
        for (int j = 1; j <= mu - m; ++j) {
            const double sign = (m % 2 == 0) ? 1.0 : -1.0;
            const double lw = log_binomial(m + j - 2, j - 1) +
                              double(j - 1) * log_d2 + double(m) * log_d1 -
                              double(m + j - 1) * log_gap;
            // unified-table presentation of the same weight
            const double lw_table = log_binomial(m + j - 2, j - 1) +
                                    double(m) * log_p - double(m + j - 1) * log_q;
            if (std::abs(lw - lw_table) > 1e-9 * std::max(1.0, std::abs(lw)))
                throw InternalConsistencyError(
                    "build_mixture: coefficient presentations disagree");
            logs.push_back({sign, lw});
            model.components.push_back({0.0, mu - m - j + 1, d1});
        }
        for (int j = 1; j <= m; ++j) {
            const double sign = (j % 2 == 1) ? 1.0 : -1.0;
            const double lw = log_binomial(mu - m + j - 2, j - 1) +
                              double(j - 1) * log_d1 + double(mu - m) * log_d2 -
                              double(mu - m + j - 1) * log_gap;
            const double lw_table = log_binomial(mu - m + j - 2, j - 1) +
                                    double(j - 1) * log_p +
                                    double(m - mu - j + 1) * log_q;
            if (std::abs(lw - lw_table) > 1e-9 * std::max(1.0, std::abs(lw)))
                throw InternalConsistencyError(
                    "build_mixture: coefficient presentations disagree");
            logs.push_back({sign, lw});
            model.components.push_back({0.0, m - j + 1, d2});
        }
    }

    CompensatedSum weight_sum;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        const double w = logs[i].sign * std::exp(logs[i].log_mag);
        if (!std::isfinite(w))
            throw InternalConsistencyError("build_mixture: weight overflow");
        model.components[i].weight = w;
        weight_sum.add(w);
    }
    if (std::abs(weight_sum.value() - 1.0) > 1e-9)
        throw InternalConsistencyError(
            "build_mixture: weights do not sum to 1 (residual " +
            std::to_string(std::abs(weight_sum.value() - 1.0)) + ")");

    // evaluation tables
    for (const auto& comp : model.components) {
        auto it = std::find_if(model.groups.begin(), model.groups.end(),
                               [&](const auto& g) { return g.scale == comp.scale; });
        if (it == model.groups.end()) {
            model.groups.push_back({comp.scale, {}});
            it = std::prev(model.groups.end());
        }
        if (it->weight_by_shape.size() < std::size_t(comp.shape))
            it->weight_by_shape.resize(std::size_t(comp.shape), 0.0);
        it->weight_by_shape[std::size_t(comp.shape - 1)] += comp.weight;
    }
    model.eval_order.resize(model.components.size());
    std::iota(model.eval_order.begin(), model.eval_order.end(), std::size_t{0});
    std::stable_sort(model.eval_order.begin(), model.eval_order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return std::abs(model.components[a].weight) >
                                std::abs(model.components[b].weight);
                     });
    double peak = 0.0;
    for (const auto& comp : model.components)
        peak += std::abs(comp.weight) * detail::gamma_peak_density(comp.shape, comp.scale);
    model.clamp_tol = 1e-12 * peak;
    if (model.regime == Regime::Improper) {
        model.x_near = 0.5 * d1;
        model.origin_coeff =
            detail::improper_origin_coefficients(model.components, logs, mu, d1);
    }
    return model;
}

namespace detail {

inline double origin_series_pdf(const MixtureModel& model, double x) {
    const double u = x / model.delta.delta1;
    double s = 0.0;
    for (std::size_t j = model.origin_coeff.size(); j-- > 0;)
        s = s * u + model.origin_coeff[j];
    const double mu = double(model.params.mu);
    return std::exp((mu - 1.0) * std::log(u)) * s / model.delta.delta1;
}

inline double origin_series_cdf(const MixtureModel& model, double x) {
    const double u = x / model.delta.delta1;
    const double mu = double(model.params.mu);
    double s = 0.0;
    for (std::size_t j = model.origin_coeff.size(); j-- > 0;)
        s = s * u + model.origin_coeff[j] / (mu + double(j));
    return std::exp(mu * std::log(u)) * s;
}

}  // namespace detail

/// Mixture PDF at x >= 0. Tiny negatives from signed-weight cancellation clamp
/// to zero; anything below -clamp_tol indicates a coefficient bug and throws.
inline double pdf(const MixtureModel& model, double x) {
    if (x < 0.0) throw NegativeInputError("pdf: requires x >= 0");
    if (model.regime == Regime::Improper && x < model.x_near)
        return x == 0.0 ? 0.0 : detail::origin_series_pdf(model, x);
    CompensatedSum sum;
    for (const auto& group : model.groups) {
        const double y = x / group.scale;
        const int rmax = int(group.weight_by_shape.size()) - 1;
        const std::vector<double> row = detail::poisson_pmf_row(y, rmax);
        for (int r = 0; r <= rmax; ++r) {
            const double w = group.weight_by_shape[std::size_t(r)];
            if (w != 0.0) sum.add(w * row[std::size_t(r)] / group.scale);
        }
    }
    const double v = sum.value();
    if (v < 0.0) {
        if (v >= -model.clamp_tol) return 0.0;
        throw InternalConsistencyError("pdf: negative density beyond the clamp floor");
    }
    return v;
}

/// Mixture CDF at x >= 0, clamped to [0, 1]; exactly 0 at x = 0.
inline double cdf(const MixtureModel& model, double x) {
    if (x < 0.0) throw NegativeInputError("cdf: requires x >= 0");
    if (x == 0.0) return 0.0;
    if (model.regime == Regime::Improper && x < model.x_near)
        return std::clamp(detail::origin_series_cdf(model, x), 0.0, 1.0);
    CompensatedSum sum;
    for (const auto& group : model.groups) {
        const double y = x / group.scale;
        const int kmax = int(group.weight_by_shape.size());
        const std::vector<double> row = detail::poisson_pmf_row(y, kmax - 1);
        // P(k, y) accumulated downward from the largest shape in the group
        double p_upper = detail::erlang_cdf(kmax, y);
        for (int k = kmax; k >= 1; --k) {
            const double w = group.weight_by_shape[std::size_t(k - 1)];
            if (w != 0.0) sum.add(w * p_upper);
            if (k > 1) p_upper += row[std::size_t(k - 1)];
        }
    }
    return std::clamp(sum.value(), 0.0, 1.0);
}

/// MGF in rational form, (1 - d1 s)^{m-mu} / (1 - d2 s)^m, for s < 1/d2.
inline double mgf_rational(const ShadowedParams& params, double s) {
    const DeltaPair d = delta_pair(params);
    if (!(s < 1.0 / d.delta2))
        throw OutOfRegionError("mgf_rational: requires s < 1/delta2");
    const double log_m = double(params.m - params.mu) * std::log1p(-d.delta1 * s) -
                         double(params.m) * std::log1p(-d.delta2 * s);
    return std::exp(log_m);
}

/// MGF as the weighted component sum, sum_i C_i (1 - Omega_i s)^{-m_i}; equals
/// mgf_rational on s < 1/max(Omega_i).
inline double mgf_mixture(const MixtureModel& model, double s) {
    double max_scale = 0.0;
    for (const auto& comp : model.components) max_scale = std::max(max_scale, comp.scale);
    if (!(s < 1.0 / max_scale))
        throw OutOfRegionError("mgf_mixture: requires s < 1/max scale");
    CompensatedSum sum;
    for (std::size_t idx : model.eval_order) {
        const auto& comp = model.components[idx];
        sum.add(comp.weight * std::exp(-double(comp.shape) * std::log1p(-comp.scale * s)));
    }
    return sum.value();
}

/// n-th raw moment, sum_i C_i Omega_i^n (m_i)(m_i+1)...(m_i+n-1).
inline double moment(const MixtureModel& model, int n) {
    if (n < 1) throw InvalidParamsError("moment: requires n >= 1");
    CompensatedSum sum;
    for (std::size_t idx : model.eval_order) {
        const auto& comp = model.components[idx];
        double rising = 1.0;
        for (int t = 0; t < n; ++t) rising *= double(comp.shape + t);
        sum.add(comp.weight * std::pow(comp.scale, double(n)) * rising);
    }
    return sum.value();
}

}  // namespace fadekit
