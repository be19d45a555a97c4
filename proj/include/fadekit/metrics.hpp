#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "fadekit/core.hpp"
#include "fadekit/mixture.hpp"
#include "fadekit/quadrature.hpp"
#include "fadekit/reference.hpp"
#include "fadekit/special_functions.hpp"

namespace fadekit {

/// Lifts a metric already solved for squared-Nakagami fading to the shadowed
/// model: sum_i C_i h(m_i Omega_i, m_i), i.e. h at each component's mean and
/// shape. Components are accumulated in decreasing |C_i| with compensation so
/// the signed-weight regime cancels cleanly.
template <class NakagamiMetricFn>
double average_metric(const MixtureModel& model, NakagamiMetricFn&& h) {
    CompensatedSum sum;
    for (std::size_t idx : model.eval_order) {
        const auto& comp = model.components[idx];
        double value;
        try {
            value = h(double(comp.shape) * comp.scale, comp.shape);
        } catch (const std::exception& e) {
            throw MetricEvaluationError(std::string("average_metric: ") + e.what());
        }
        if (!std::isfinite(value))
            throw MetricEvaluationError("average_metric: metric returned a non-finite value");
        sum.add(comp.weight * value);
    }
    return sum.value();
}

/// Ergodic capacity E[log2(1 + g)] over Gamma(m_hat, gamma_bar/m_hat) fading,
/// log2(e) * sum_{k<m_hat} e^x x^k Gamma(-k, x) at x = m_hat/gamma_bar.
inline double nakagami_capacity(double gamma_bar, int m_hat) {
    if (!(gamma_bar > 0.0) || m_hat < 1)
        throw InvalidParamsError("nakagami_capacity: requires gamma_bar > 0, m_hat >= 1");
    const double x = double(m_hat) / gamma_bar;
    const std::vector<double> terms = exp_gamma_negint_terms(m_hat, x);
    CompensatedSum sum;
    for (double t : terms) sum.add(t);
    return constants::log2_e * sum.value();
}

/// Ergodic capacity of the shadowed model: the capacity lift of the mixture.
inline double shadowed_capacity(const MixtureModel& model) {
    return average_metric(
        model, [](double gbar, int m_hat) { return nakagami_capacity(gbar, m_hat); });
}

/// Outage probability at threshold gamma_th: the CDF evaluated there.
inline double outage_probability(const MixtureModel& model, double gamma_th) {
    if (gamma_th < 0.0) throw NegativeInputError("outage_probability: requires gamma_th >= 0");
    return cdf(model, gamma_th);
}

/// Classical Rician-to-Nakagami moment matching, m_hat = (1+K)^2 / (1+2K).
/// Exact at the body of the distribution but wrong at the origin, which is
/// what the shadowed approximation below fixes.
inline double nakagami_equiv_m(double k_factor) {
    if (!(k_factor > 0.0)) throw InvalidParamsError("nakagami_equiv_m: requires K > 0");
    return (1.0 + k_factor) * (1.0 + k_factor) / (1.0 + 2.0 * k_factor);
}

/// Gamma-mixture approximation to the Rician distribution with factor K:
/// the shadowed model at mu = 1 with m terms. Keeps diversity order 1.
inline MixtureModel rician_shadowed_approx(double k_factor, int m, double gamma_bar) {
    return build_mixture({gamma_bar, k_factor, 1, m});
}

/// Sup-norm CDF gaps between the shadowed model and its kappa-mu limit for a
/// list of m values, on a fixed log grid (deterministic report fixture).
struct ConvergenceReport {
    std::vector<int> m_values;
    std::vector<double> sup_gaps;
};

namespace detail {

/// Reference kappa-mu CDF on an ascending grid: panel integrals are computed
/// independently (parallelizable), then prefix-summed in a fixed order.
inline std::vector<double> kappa_mu_cdf_grid(double gamma_bar, double kappa, double mu,
                                             const std::vector<double>& grid) {
    std::vector<double> panel(grid.size());
    const QuadOptions opts{1e-306, 1e-11, 20000};
    parallel_for(grid.size(), [&](std::size_t i) {
        const double lo = i == 0 ? 0.0 : grid[i - 1];
        panel[i] = integrate(
            [&](double t) { return pdf_kappa_mu(gamma_bar, kappa, mu, t); }, lo, grid[i],
            opts);
    });
    std::vector<double> out(grid.size());
    CompensatedSum acc;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        acc.add(panel[i]);
        out[i] = std::min(acc.value(), 1.0);
    }
    return out;
}

}  // namespace detail

inline ConvergenceReport convergence_gap(double kappa, int mu, double gamma_bar,
                                         const std::vector<int>& m_list) {
    if (!(kappa > 0.0) || mu < 1 || !(gamma_bar > 0.0))
        throw InvalidParamsError("convergence_gap: invalid parameters");
    const std::vector<double> grid = log_grid(1e-6 * gamma_bar, 50.0 * gamma_bar, 2001);
    const std::vector<double> f_km =
        detail::kappa_mu_cdf_grid(gamma_bar, kappa, double(mu), grid);
    ConvergenceReport report;
    report.m_values = m_list;
    report.sup_gaps.resize(m_list.size());
    for (std::size_t k = 0; k < m_list.size(); ++k) {
        const MixtureModel model = build_mixture({gamma_bar, kappa, mu, m_list[k]});
        std::vector<double> gap(grid.size());
        parallel_for(grid.size(), [&](std::size_t i) {
            gap[i] = std::abs(cdf(model, grid[i]) - f_km[i]);
        });
        double sup = 0.0;
        for (double g : gap) sup = std::max(sup, g);
        report.sup_gaps[k] = sup;
    }
    return report;
}

/// Sup-norm PDF gap between the m-term Rician shadowed approximation and the
/// Rician (kappa-mu, mu = 1) density, on the same fixed log grid.
inline double rician_approx_pdf_gap(double k_factor, int m, double gamma_bar) {
    const MixtureModel model = rician_shadowed_approx(k_factor, m, gamma_bar);
    const std::vector<double> grid = log_grid(1e-6 * gamma_bar, 50.0 * gamma_bar, 2001);
    std::vector<double> gap(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        gap[i] = std::abs(pdf(model, grid[i]) - pdf_kappa_mu(gamma_bar, k_factor, 1.0, grid[i]));
    });
    double sup = 0.0;
    for (double g : gap) sup = std::max(sup, g);
    return sup;
}

}  // namespace fadekit
