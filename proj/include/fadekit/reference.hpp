#pragma once

#include <cmath>
#include <limits>

#include "fadekit/core.hpp"
#include "fadekit/params.hpp"
#include "fadekit/special_functions.hpp"

namespace fadekit {

/// Direct-series PDF of the kappa-mu shadowed SNR distribution for arbitrary
/// real parameters. Ground truth for the finite-mixture path; all prefactors
/// are assembled in log space so extreme parameter combinations stay finite.
inline double pdf_direct(const RealShadowedParams& p, double x) {
    validate(p);
    if (x < 0.0) throw NegativeInputError("pdf_direct: requires x >= 0");
    if (x == 0.0) {
        if (p.mu > 1.0) return 0.0;
        if (p.mu < 1.0) return std::numeric_limits<double>::infinity();
        const double mk = p.m + p.kappa;  // mu = 1
        return std::exp(p.m * std::log(p.m) + std::log1p(p.kappa) -
                        p.m * std::log(mk)) /
               p.gamma_bar;
    }
    const double u = x / p.gamma_bar;
    const double mk = p.m + p.mu * p.kappa;
    const double z = p.mu * p.mu * p.kappa * (1.0 + p.kappa) * u / mk;
    const double log_pref = p.mu * std::log(p.mu) + p.m * std::log(p.m) +
                            p.mu * std::log1p(p.kappa) - std::lgamma(p.mu) -
                            p.m * std::log(mk) - std::log(p.gamma_bar);
    const double log_f = log_pref + (p.mu - 1.0) * std::log(u) -
                         p.mu * (1.0 + p.kappa) * u +
                         log_kummer_1f1_pos(p.m, p.mu, z);
    return std::exp(log_f);
}

/// PDF of the kappa-mu SNR distribution (the deterministic-LOS limit),
/// evaluated with the exponentially scaled Bessel series.
inline double pdf_kappa_mu(double gamma_bar, double kappa, double mu, double x) {
    if (!(gamma_bar > 0.0) || !(kappa > 0.0) || !(mu > 0.0))
        throw InvalidParamsError("pdf_kappa_mu: parameters must be positive");
    if (x < 0.0) throw NegativeInputError("pdf_kappa_mu: requires x >= 0");
    if (x == 0.0) {
        if (mu > 1.0) return 0.0;
        if (mu < 1.0) return std::numeric_limits<double>::infinity();
        return (1.0 + kappa) * std::exp(-kappa) / gamma_bar;  // mu = 1
    }
    const double u = x / gamma_bar;
    const double arg = 2.0 * mu * std::sqrt(kappa * (1.0 + kappa) * u);
    const double log_f = std::log(mu) + 0.5 * (mu + 1.0) * std::log1p(kappa) -
                         std::log(gamma_bar) - 0.5 * (mu - 1.0) * std::log(kappa) -
                         mu * kappa + 0.5 * (mu - 1.0) * std::log(u) -
                         mu * (1.0 + kappa) * u + log_bessel_i(mu - 1.0, arg);
    return std::exp(log_f);
}

/// Squared-Nakagami (Gamma) PDF with shape m_hat and mean gamma_bar.
inline double nakagami_pdf(double gamma_bar, int m_hat, double x) {
    if (!(gamma_bar > 0.0) || m_hat < 1)
        throw InvalidParamsError("nakagami_pdf: requires gamma_bar > 0, m_hat >= 1");
    if (x < 0.0) throw NegativeInputError("nakagami_pdf: requires x >= 0");
    if (x == 0.0) return m_hat == 1 ? 1.0 / gamma_bar : 0.0;
    const double mh = double(m_hat);
    return std::exp(mh * std::log(mh / gamma_bar) + (mh - 1.0) * std::log(x) -
                    x * mh / gamma_bar - std::lgamma(mh));
}

/// CDF matching nakagami_pdf: 1 - e^{-x/D} sum_{r<m_hat} (x/D)^r / r! with
/// D = gamma_bar / m_hat.
inline double nakagami_cdf(double gamma_bar, int m_hat, double x) {
    if (!(gamma_bar > 0.0) || m_hat < 1)
        throw InvalidParamsError("nakagami_cdf: requires gamma_bar > 0, m_hat >= 1");
    if (x < 0.0) throw NegativeInputError("nakagami_cdf: requires x >= 0");
    return detail::erlang_cdf(m_hat, x * double(m_hat) / gamma_bar);
}

}  // namespace fadekit
