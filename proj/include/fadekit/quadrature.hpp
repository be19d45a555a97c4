#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <vector>

#include "fadekit/core.hpp"

namespace fadekit {

/// Tolerances and subdivision budget for the adaptive integrator.
struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    std::size_t max_subdivisions = 10000;
};

/// Gamma tail envelope used to truncate semi-infinite integrals: beyond
/// gamma_tail_cutoff the tail of a Gamma(shape, scale) density is negligible
/// relative to its mass.
struct TailEnvelope {
    double shape;
    double scale;
};

inline double gamma_tail_cutoff(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw InvalidParamsError("gamma_tail_cutoff: shape and scale must be positive");
    return scale * (shape + 40.0 + 10.0 * std::log(shape + 1.0));
}

/// Truncation point for kappa-mu integrands: smallest x where the exponential
/// decay has beaten the Bessel growth by ~e^{-80}, with a safety margin.
inline double kappa_mu_tail_cutoff(double gamma_bar, double kappa, double mu) {
    const double w = std::sqrt(kappa) + std::sqrt(kappa + 80.0 / mu);
    return 1.25 * gamma_bar * w * w / (1.0 + kappa);
}

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15).
inline constexpr std::array<double, 8> gk15_nodes = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
inline constexpr std::array<double, 8> gk15_kronrod_w = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679,  0.1903505780647854,  0.2044329400752989, 0.2094821410847278};
inline constexpr std::array<double, 4> gk15_gauss_w = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

struct PanelResult {
    double integral;
    double error;
};

template <class F>
PanelResult gk15_panel(F&& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<double, 15> fv{};
    for (int i = 0; i < 7; ++i) {
        fv[std::size_t(2 * i)] = f(center - half * gk15_nodes[std::size_t(i)]);
        fv[std::size_t(2 * i + 1)] = f(center + half * gk15_nodes[std::size_t(i)]);
    }
    fv[14] = f(center);
    double resk = gk15_kronrod_w[7] * fv[14];
    double resg = gk15_gauss_w[3] * fv[14];
    for (int i = 0; i < 7; ++i) {
        const double pair = fv[std::size_t(2 * i)] + fv[std::size_t(2 * i + 1)];
        resk += gk15_kronrod_w[std::size_t(i)] * pair;
        if (i % 2 == 1) resg += gk15_gauss_w[std::size_t(i / 2)] * pair;
    }
    const double reskh = 0.5 * resk;
    double resasc = gk15_kronrod_w[7] * std::abs(fv[14] - reskh);
    for (int i = 0; i < 7; ++i)
        resasc += gk15_kronrod_w[std::size_t(i)] *
                  (std::abs(fv[std::size_t(2 * i)] - reskh) +
                   std::abs(fv[std::size_t(2 * i + 1)] - reskh));
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (!std::isfinite(resk))
        throw QuadratureError("gk15_panel: non-finite integrand value");
    return {resk * half, err};
}

struct Segment {
    double a, b, integral, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over the finite interval [a, b] to
/// max(abs_tol, rel_tol * |I|). Throws QuadratureError when the subdivision
/// budget is exhausted before the tolerance is met.
template <class F>
double integrate(F&& f, double a, double b, const QuadOptions& opts = {}) {
    if (a == b) return 0.0;
    if (!(std::isfinite(a) && std::isfinite(b)))
        throw QuadratureError("integrate: bounds must be finite");
    std::priority_queue<detail::Segment> segments;
    auto first = detail::gk15_panel(f, a, b);
    segments.push({a, b, first.integral, first.error});
    double total = first.integral;
    double total_err = first.error;
    std::size_t splits = 0;
    while (total_err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
        if (splits >= opts.max_subdivisions || segments.empty())
            throw QuadratureError("integrate: tolerance not met within subdivision budget");
        const detail::Segment worst = segments.top();
        segments.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw QuadratureError("integrate: interval too small to subdivide further");
        auto left = detail::gk15_panel(f, worst.a, mid);
        auto right = detail::gk15_panel(f, mid, worst.b);
        total += left.integral + right.integral - worst.integral;
        total_err += left.error + right.error - worst.error;
        segments.push({worst.a, mid, left.integral, left.error});
        segments.push({mid, worst.b, right.integral, right.error});
        ++splits;
    }
    // final pass: recompute the sum in descending-error order for stability
    CompensatedSum s;
    while (!segments.empty()) {
        s.add(segments.top().integral);
        segments.pop();
    }
    return s.value();
}

/// Oracle CDF at x: integral of pdf_fn over [0, x].
template <class F>
double quad_cdf(F&& pdf_fn, double x, const QuadOptions& opts = {}) {
    if (x < 0.0) throw NegativeInputError("quad_cdf: requires x >= 0");
    if (x == 0.0) return 0.0;
    return integrate(pdf_fn, 0.0, x, opts);
}

/// Oracle expectation: integral of h(x) pdf_fn(x) over [a, b]. An infinite b
/// requires a Gamma tail envelope to pick the truncation point.
template <class F, class H>
double quad_expect(F&& pdf_fn, H&& h, double a, double b,
                   std::optional<TailEnvelope> envelope = std::nullopt,
                   const QuadOptions& opts = {}) {
    if (a < 0.0) throw NegativeInputError("quad_expect: requires a >= 0");
    if (std::isinf(b)) {
        if (!envelope)
            throw QuadratureError(
                "quad_expect: infinite upper limit requires a tail envelope");
        b = gamma_tail_cutoff(envelope->shape, envelope->scale);
    }
    if (b <= a) return 0.0;
    return integrate([&](double x) { return pdf_fn(x) * h(x); }, a, b, opts);
}

/// Oracle CDF on an ascending grid, accumulated panel by panel so each value
/// costs one short adaptive integral. Returns F(grid[i]) for every i.
template <class F>
std::vector<double> quad_cdf_grid(F&& pdf_fn, const std::vector<double>& grid,
                                  const QuadOptions& opts = {}) {
    std::vector<double> out(grid.size());
    CompensatedSum acc;
    double prev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        if (x < prev) throw InvalidParamsError("quad_cdf_grid: grid must be ascending");
        if (x > prev) acc.add(integrate(pdf_fn, prev, x, opts));
        out[i] = acc.value();
        prev = x;
    }
    return out;
}

}  // namespace fadekit
