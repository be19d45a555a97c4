#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "fadekit/core.hpp"

namespace fadekit {

/// Termination control for the series evaluators.
struct SeriesControl {
    double rel_tol = 1e-14;
    std::size_t max_terms = 1000000;
};

inline void validate(const SeriesControl& ctl) {
    if (!(ctl.rel_tol > 0.0) || ctl.rel_tol > 1e-6)
        throw InvalidParamsError("SeriesControl.rel_tol must lie in (0, 1e-6]");
    if (ctl.max_terms < 100)
        throw InvalidParamsError("SeriesControl.max_terms must be >= 100");
}

namespace constants {
inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;
inline constexpr double log2_e = 1.4426950408889634073599246810018921;
}  // namespace constants

namespace detail {

inline bool is_nonpositive_integer(double v) {
    return v <= 0.0 && v == std::floor(v);
}

inline bool is_nonnegative_integer(double v) {
    return v >= 0.0 && v == std::floor(v);
}

/// Sum of the Kummer series at nonnegative argument, carried with a power-of-two
/// rescale so partial sums never overflow. Valid whenever the terms do not
/// change sign past the running maximum (a > 0, or a a nonpositive integer, in
/// which case the series terminates). Returns log of the sum.
inline double log_kummer_series_pos(double a, double b, double w, const SeriesControl& ctl) {
    // true value = sum * 2^(512 * rescales)
    double sum = 1.0;
    double term = 1.0;
    double prev = std::numeric_limits<double>::max();
    long rescales = 0;
    for (std::size_t k = 0; k < ctl.max_terms; ++k) {
        const double dk = double(k);
        term *= (a + dk) * w / ((b + dk) * (dk + 1.0));
        if (term == 0.0) break;
        sum += term;
        const double at = std::abs(term);
        if (at <= ctl.rel_tol * sum && at <= prev) break;
        prev = at;
        if (sum > 1e280) {
            sum *= 0x1p-512;
            term *= 0x1p-512;
            ++rescales;
        }
        if (k + 1 == ctl.max_terms)
            throw NoConvergenceError("kummer_1f1: series did not converge");
    }
    return std::log(sum) + double(rescales) * (512.0 * M_LN2);
}

/// Plain compensated summation of the Kummer series; adequate when the sum is
/// O(exp(|w|)) or smaller and term cancellation is bounded.
inline double kummer_series(double a, double b, double w, const SeriesControl& ctl) {
    CompensatedSum sum;
    sum.add(1.0);
    double term = 1.0;
    double prev = std::numeric_limits<double>::max();
    for (std::size_t k = 0; k < ctl.max_terms; ++k) {
        const double dk = double(k);
        term *= (a + dk) * w / ((b + dk) * (dk + 1.0));
        if (term == 0.0) break;
        sum.add(term);
        const double at = std::abs(term);
        if (at <= ctl.rel_tol * std::abs(sum.value()) && at <= prev) break;
        prev = at;
        if (k + 1 == ctl.max_terms)
            throw NoConvergenceError("kummer_1f1: series did not converge");
    }
    return sum.value();
}

}  // namespace detail

/// Confluent hypergeometric function 1F1(a, b; z), b not a nonpositive integer.
///
/// Negative arguments are routed through the Kummer transform
/// 1F1(a,b;z) = e^z 1F1(b-a,b;-z) so the series is always summed at a
/// nonnegative argument. For a - b a nonnegative integer and large z the same
/// transform terminates after a - b + 1 positive terms and is used directly.
inline double kummer_1f1(double a, double b, double z, const SeriesControl& ctl = {}) {
    validate(ctl);
    if (detail::is_nonpositive_integer(b))
        throw InvalidParamsError("kummer_1f1: b must not be a nonpositive integer");
    if (z == 0.0) return 1.0;
    constexpr double z_switch = 40.0;
    if (z < 0.0) {
        // route through the transform so the series argument is nonnegative
        const double d = b - a;
        if (d > 0.0) return std::exp(z + detail::log_kummer_series_pos(d, b, -z, ctl));
        return std::exp(z) * detail::kummer_series(d, b, -z, ctl);
    }
    if (z > z_switch && detail::is_nonnegative_integer(a - b)) {
        // terminating transform: every term of 1F1(b-a, b; -z) is positive here
        return std::exp(z + detail::log_kummer_series_pos(b - a, b, -z, ctl));
    }
    return detail::kummer_series(a, b, z, ctl);
}

/// log 1F1(a, b; z) for a > 0, b > 0, z >= 0 (all-positive series). Safe for
/// arguments far beyond the overflow range of the plain value.
inline double log_kummer_1f1_pos(double a, double b, double z, const SeriesControl& ctl = {}) {
    validate(ctl);
    if (!(a > 0.0) || !(b > 0.0))
        throw InvalidParamsError("log_kummer_1f1_pos: requires a > 0 and b > 0");
    if (z < 0.0) throw NegativeInputError("log_kummer_1f1_pos: requires z >= 0");
    if (z == 0.0) return 0.0;
    return detail::log_kummer_series_pos(a, b, z, ctl);
}

namespace detail {

/// Hankel asymptotic expansion of log I_nu(z), truncated at its smallest term;
/// accurate past z ~ max(60, 4 nu^2).
inline double log_bessel_i_asymptotic(double nu, double z) {
    const double mu4 = 4.0 * nu * nu;
    CompensatedSum sum;
    sum.add(1.0);
    double term = 1.0;
    double prev = std::numeric_limits<double>::max();
    for (int k = 1; k <= 60; ++k) {
        const double dk = double(2 * k - 1);
        term *= -(mu4 - dk * dk) / (8.0 * double(k) * z);
        if (std::abs(term) >= prev) break;  // divergent tail reached
        sum.add(term);
        prev = std::abs(term);
        if (prev < 1e-18) break;
    }
    return z - 0.5 * std::log(2.0 * M_PI * z) + std::log(sum.value());
}

}  // namespace detail

/// log I_nu(z) for nu >= 0, z > 0: ascending series with power-of-two
/// rescaling of the partial sums, switching to the Hankel expansion once z is
/// far past the series' economical range.
inline double log_bessel_i(double nu, double z, const SeriesControl& ctl = {}) {
    validate(ctl);
    if (nu < 0.0) throw InvalidParamsError("log_bessel_i: requires nu >= 0");
    if (!(z > 0.0)) throw NonPositiveInputError("log_bessel_i: requires z > 0");
    if (z >= 60.0 && z >= 4.0 * nu * nu) return detail::log_bessel_i_asymptotic(nu, z);
    const double q = 0.25 * z * z;
    double sum = 1.0;
    double term = 1.0;
    long rescales = 0;
    for (std::size_t k = 0; k < ctl.max_terms; ++k) {
        const double dk = double(k);
        term *= q / ((dk + 1.0) * (dk + nu + 1.0));
        if (term == 0.0) break;
        sum += term;
        if (term <= ctl.rel_tol * sum && dk + 1.0 > 0.5 * z) break;
        if (sum > 1e280) {
            sum *= 0x1p-512;
            term *= 0x1p-512;
            ++rescales;
        }
        if (k + 1 == ctl.max_terms)
            throw NoConvergenceError("bessel_i: series did not converge");
    }
    return nu * std::log(0.5 * z) - std::lgamma(nu + 1.0) + std::log(sum) +
           double(rescales) * (512.0 * M_LN2);
}

/// Modified Bessel function of the first kind I_nu(z), nu >= 0, z >= 0.
inline double bessel_i(double nu, double z, const SeriesControl& ctl = {}) {
    if (nu < 0.0) throw InvalidParamsError("bessel_i: requires nu >= 0");
    if (z < 0.0) throw NegativeInputError("bessel_i: requires z >= 0");
    if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    return std::exp(log_bessel_i(nu, z, ctl));
}

/// Exponentially scaled variant e^{-z} I_nu(z); finite for all z >= 0.
inline double bessel_i_scaled(double nu, double z, const SeriesControl& ctl = {}) {
    if (nu < 0.0) throw InvalidParamsError("bessel_i_scaled: requires nu >= 0");
    if (z < 0.0) throw NegativeInputError("bessel_i_scaled: requires z >= 0");
    if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    return std::exp(log_bessel_i(nu, z, ctl) - z);
}

namespace detail {

/// Continued fraction H(a, x) with Gamma(a, x) = e^{-x} x^a H(a, x), evaluated
/// by the modified Lentz scheme (DLMF 8.9.2). Converges for x > 0; used here
/// for a <= 0, where it is reliable for x >= 1.
inline double upper_gamma_cf(double a, double x) {
    constexpr double fpmin = 1e-300;
    constexpr double eps = 1e-15;
    constexpr int itmax = 100000;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int n = 1; n <= itmax; ++n) {
        const double an = -double(n) * (double(n) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) <= eps) return h;
    }
    throw NoConvergenceError("upper_gamma_cf: continued fraction did not converge");
}

/// Poisson weights e^{-y} y^r / r! for r = 0..rmax. Mode-centered fill keeps
/// every entry finite for arbitrarily large y.
inline std::vector<double> poisson_pmf_row(double y, int rmax) {
    std::vector<double> row(std::size_t(rmax) + 1, 0.0);
    if (y <= 0.0) {
        row[0] = 1.0;
        return row;
    }
    if (y <= 700.0) {
        row[0] = std::exp(-y);
        for (int r = 1; r <= rmax; ++r)
            row[std::size_t(r)] = row[std::size_t(r - 1)] * y / double(r);
    } else {
        const int r0 = std::min(rmax, int(y));
        row[std::size_t(r0)] =
            std::exp(double(r0) * std::log(y) - y - std::lgamma(double(r0) + 1.0));
        for (int r = r0 + 1; r <= rmax; ++r)
            row[std::size_t(r)] = row[std::size_t(r - 1)] * y / double(r);
        for (int r = r0 - 1; r >= 0; --r)
            row[std::size_t(r)] = row[std::size_t(r + 1)] * double(r + 1) / y;
    }
    return row;
}

/// Q(k, y) = e^{-y} sum_{r<k} y^r / r!, summed descending from r = k-1 so it
/// stays finite for any y.
inline double erlang_upper_tail(int k, double y) {
    if (y <= 0.0) return 1.0;
    double term = std::exp((double(k) - 1.0) * std::log(y) - y - std::lgamma(double(k)));
    CompensatedSum sum;
    for (int r = k - 1; r >= 0; --r) {
        sum.add(term);
        term *= double(r) / y;
        if (term < 1e-20 * sum.value()) break;
    }
    return std::min(1.0, sum.value());
}

/// P(k, y) = 1 - Q(k, y), the CDF of a unit-scale Erlang(k) at y. The y < k
/// branch uses the ascending tail series so tiny values keep full relative
/// accuracy.
inline double erlang_cdf(int k, double y) {
    if (y <= 0.0) return 0.0;
    if (y < double(k)) {
        double term = std::exp(double(k) * std::log(y) - y - std::lgamma(double(k) + 1.0));
        CompensatedSum sum;
        for (int r = k + 1; term > 0.0; ++r) {
            sum.add(term);
            term *= y / double(r);
            if (term < 1e-20 * sum.value()) break;
        }
        return std::min(1.0, sum.value());
    }
    return std::max(0.0, 1.0 - erlang_upper_tail(k, y));
}

/// E1(x) by its ascending series; intended for x <= 1.
inline double e1_series(double x) {
    CompensatedSum s;
    double term = 1.0;
    for (int k = 1; k <= 64; ++k) {
        term *= -x / double(k);
        const double add = -term / double(k);
        s.add(add);
        if (std::abs(add) < 1e-18) break;
    }
    return -constants::euler_gamma - std::log(x) + s.value();
}

}  // namespace detail

/// Exponential integral E1(x) = int_x^inf e^{-t}/t dt, x > 0.
/// Ascending series for x <= 1, continued fraction for x > 1.
inline double exp_integral_e1(double x) {
    if (!(x > 0.0)) throw NonPositiveInputError("exp_integral_e1: requires x > 0");
    if (x <= 1.0) return detail::e1_series(x);
    return std::exp(-x) * detail::upper_gamma_cf(0.0, x);
}

/// e^x E1(x); finite for all x > 0, unlike E1 which underflows past x ~ 700.
inline double exp_integral_e1_scaled(double x) {
    if (!(x > 0.0)) throw NonPositiveInputError("exp_integral_e1_scaled: requires x > 0");
    if (x <= 1.0) return std::exp(x) * detail::e1_series(x);
    return detail::upper_gamma_cf(0.0, x);
}

namespace detail {

/// 15-point Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton
/// iteration on the Legendre recurrence.
struct GaussLegendre15 {
    std::array<double, 15> node{};
    std::array<double, 15> weight{};

    GaussLegendre15() {
        constexpr int n = 15;
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double x = std::cos(M_PI * (double(i) + 0.75) / (double(n) + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j + 1.0) * x * p1 - double(j) * p2) / double(j + 1);
                }
                pp = double(n) * (x * p0 - p1) / (x * x - 1.0);
                const double dx = p0 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            node[std::size_t(i)] = -x;
            node[std::size_t(n - 1 - i)] = x;
            const double w = 2.0 / ((1.0 - x * x) * pp * pp);
            weight[std::size_t(i)] = w;
            weight[std::size_t(n - 1 - i)] = w;
        }
    }
};

inline const GaussLegendre15& gl15() {
    static const GaussLegendre15 rule;
    return rule;
}

/// T_k(x) = e^x x^k Gamma(-k, x) = int_0^inf e^{-u} (1 + u/x)^{-(k+1)} du / x
/// by composite Gauss-Legendre on [0, 60]; used where the forward recurrence
/// loses too many digits (x substantially larger than k).
inline double gamma_negint_t_quadrature(int k, double x) {
    const double rate = 1.0 + (double(k) + 1.0) / x;
    const int panels = std::min(4000, std::max(20, int(std::ceil(60.0 * rate / 3.0))));
    const double width = 60.0 / double(panels);
    const auto& rule = gl15();
    CompensatedSum total;
    for (int p = 0; p < panels; ++p) {
        const double mid = (double(p) + 0.5) * width;
        const double half = 0.5 * width;
        for (int i = 0; i < 15; ++i) {
            const double u = mid + half * rule.node[std::size_t(i)];
            const double g = std::exp(-u - (double(k) + 1.0) * std::log1p(u / x));
            total.add(rule.weight[std::size_t(i)] * half * g);
        }
    }
    return total.value() / x;
}

/// Predicted log10 digit loss of the forward recurrence
/// T_j = (1 - x T_{j-1}) / j carried out to index j.
inline double gamma_negint_forward_loss(int j, double x) {
    const double dj = double(j);
    return (dj * std::log(x) - std::lgamma(dj + 1.0) + std::log((x + dj) / x)) / M_LN10;
}

/// Largest index up to k_max the forward recurrence can reach while losing at
/// most ~4 digits (0 when even T_1 is unsafe). Loss is unimodal in j with the
/// peak near j = x, so checking the peak and the endpoint suffices.
inline int gamma_negint_forward_limit(int k_max, double x) {
    if (x <= 1.0) return k_max;  // loss < 1 digit for all j when x <= 1
    constexpr double max_loss = 4.0;
    const int jpeak = std::min(k_max, std::max(1, int(x)));
    if (gamma_negint_forward_loss(jpeak, x) <= max_loss &&
        gamma_negint_forward_loss(k_max, x) <= max_loss)
        return k_max;
    // walk down from the peak until safe
    int j = 1;
    while (j <= k_max && gamma_negint_forward_loss(j, x) <= max_loss) ++j;
    return j - 1;
}

}  // namespace detail

/// Terms T_k = e^x x^k Gamma(-k, x) for k = 0 .. count-1, x > 0. Forward
/// recurrence T_k = (1 - x T_{k-1}) / k from T_0 = e^x E1(x) where stable,
/// direct quadrature of the defining integral elsewhere.
inline std::vector<double> exp_gamma_negint_terms(int count, double x) {
    if (count < 1) throw InvalidParamsError("exp_gamma_negint_terms: count must be >= 1");
    if (!(x > 0.0)) throw NonPositiveInputError("exp_gamma_negint_terms: requires x > 0");
    std::vector<double> t(std::size_t(count), 0.0);
    const int safe = detail::gamma_negint_forward_limit(count - 1, x);
    t[0] = exp_integral_e1_scaled(x);
    for (int k = 1; k <= safe; ++k)
        t[std::size_t(k)] = (1.0 - x * t[std::size_t(k - 1)]) / double(k);
    for (int k = std::max(1, safe + 1); k < count; ++k)
        t[std::size_t(k)] = detail::gamma_negint_t_quadrature(k, x);
    return t;
}

/// G_k(x) = e^x Gamma(-k, x) for integer k >= 0 and x > 0, evaluated through
/// the scaled terms so no intermediate overflows; satisfies 0 < G_k < x^{-k-1}.
inline double scaled_upper_gamma_negint(int k, double x) {
    if (k < 0) throw InvalidParamsError("scaled_upper_gamma_negint: requires k >= 0");
    if (!(x > 0.0)) throw NonPositiveInputError("scaled_upper_gamma_negint: requires x > 0");
    const std::vector<double> t = exp_gamma_negint_terms(k + 1, x);
    return t[std::size_t(k)] * std::exp(-double(k) * std::log(x));
}

}  // namespace fadekit
