#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fadekit/core.hpp"
#include "fadekit/mixture.hpp"
#include "fadekit/quadrature.hpp"
#include "fadekit/reference.hpp"

namespace fadekit {

/// Sorted nonnegative power samples. Fifty points is the floor for a
/// meaningful ECDF fit.
struct EmpiricalSample {
    std::vector<double> values;  // ascending
    std::size_t n() const { return values.size(); }
};

inline EmpiricalSample make_empirical_sample(std::vector<double> values) {
    if (values.size() < 50)
        throw TooFewSamplesError("empirical sample needs at least 50 values, got " +
                                 std::to_string(values.size()));
    for (double v : values)
        if (!std::isfinite(v) || v < 0.0)
            throw InvalidParamsError("empirical sample values must be finite and >= 0");
    std::sort(values.begin(), values.end());
    return {std::move(values)};
}

enum class SampleFormat { Plain, Csv };

/// Reads one value per line (Plain) or a single CSV column with an optional
/// header row. NaN, infinite, negative, or unparseable entries are rejected
/// with the offending line number.
inline EmpiricalSample load_samples(std::istream& in, SampleFormat format) {
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto begin = line.find_first_not_of(" \t");
        if (begin == std::string::npos) continue;  // blank line
        const auto end = line.find_last_not_of(" \t");
        std::string field = line.substr(begin, end - begin + 1);
        if (format == SampleFormat::Csv && field.find(',') != std::string::npos)
            throw ParseError(line_no, "expected a single CSV column");
        char* parse_end = nullptr;
        const double v = std::strtod(field.c_str(), &parse_end);
        const bool parsed = parse_end == field.c_str() + field.size() && !field.empty();
        if (!parsed) {
            if (format == SampleFormat::Csv && first_content) {
                first_content = false;  // header row
                continue;
            }
            throw ParseError(line_no, "not a number: '" + field + "'");
        }
        first_content = false;
        if (std::isnan(v)) throw ParseError(line_no, "NaN sample");
        if (std::isinf(v)) throw ParseError(line_no, "infinite sample");
        if (v < 0.0) throw ParseError(line_no, "negative sample");
        values.push_back(v);
    }
    return make_empirical_sample(std::move(values));
}

/// One-sample Kolmogorov-Smirnov distance between the sorted sample and a
/// model CDF.
template <class CdfFn>
double ks_statistic(const std::vector<double>& sorted_values, CdfFn&& cdf_fn) {
    const double n = double(sorted_values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted_values.size(); ++i) {
        const double f = cdf_fn(sorted_values[i]);
        d = std::max(d, std::max((double(i) + 1.0) / n - f, f - double(i) / n));
    }
    return d;
}

namespace detail {

/// Evaluation grid for the error factor: order-statistic indices 1..n thinned
/// to at most 2000 points.
inline std::vector<std::size_t> epsilon_grid_indices(std::size_t n) {
    constexpr std::size_t cap = 2000;
    std::vector<std::size_t> idx;
    if (n <= cap) {
        idx.resize(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i + 1;
        return idx;
    }
    idx.reserve(cap);
    for (std::size_t k = 1; k <= cap; ++k) {
        const auto i = std::size_t(std::llround(double(k) * double(n) / double(cap)));
        if (idx.empty() || i > idx.back()) idx.push_back(std::min(i, n));
    }
    return idx;
}

}  // namespace detail

/// Error factor between the sample ECDF and a model CDF:
/// max over the evaluation grid of |log10 F_hat - log10 F|, skipping points
/// where either CDF sits below the floor 1/(2n). Returns +inf when no grid
/// point survives the floor (a hopelessly misplaced model).
template <class CdfFn>
double epsilon(const EmpiricalSample& sample, CdfFn&& cdf_fn) {
    const std::size_t n = sample.n();
    if (sample.values.front() == sample.values.back())
        throw DegenerateSampleError("epsilon: all sample values identical");
    const double floor_p = 0.5 / double(n);
    double worst = -1.0;
    for (std::size_t i : detail::epsilon_grid_indices(n)) {
        const double x = sample.values[i - 1];
        const double f_hat = double(i) / double(n);
        const double f = cdf_fn(x);
        if (f_hat < floor_p || f < floor_p) continue;
        worst = std::max(worst, std::abs(std::log10(f_hat) - std::log10(f)));
    }
    return worst < 0.0 ? std::numeric_limits<double>::infinity() : worst;
}

// ---------------------------------------------------------------------------
// Integer-parameter fitting
// ---------------------------------------------------------------------------

struct ModelSet {
    bool shadowed_int = true;
    bool rician = true;
    bool nakagami = true;
};

struct FitCandidate {
    std::string model;  // "shadowed_int", "rician", "nakagami"
    std::optional<int> mu;
    std::optional<int> m;
    std::optional<double> kappa;
    double epsilon = std::numeric_limits<double>::infinity();
};

struct FitResult {
    FitCandidate best;
    double gamma_bar = 0.0;
    std::vector<FitCandidate> candidates;
    std::vector<double> eval_points;
    double floor_p = 0.0;
};

namespace detail {

inline constexpr double log10_kappa_lo = -3.0;  // = log10(limits::kappa_min)
inline constexpr double log10_kappa_hi = 3.0;   // kappa search cap 1e3

/// Golden-section minimum of fn on [lo, hi], seeded by the caller's bracket;
/// fn is assumed unimodal (a coarse pre-scan guards the assumption).
template <class Fn>
std::pair<double, double> golden_min(Fn&& fn, double lo, double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = fn(x1), f2 = fn(x2);
    for (int it = 0; it < 60 && (b - a) > 1e-7; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = fn(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = fn(x2);
        }
    }
    return f1 <= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

/// Minimize fn over log10(kappa): 25-point coarse scan to place the bracket,
/// golden section inside it, then a final three-point parabolic polish.
template <class Fn>
std::pair<double, double> kappa_search(Fn&& fn) {
    constexpr int scan_points = 25;
    double best_l = log10_kappa_lo;
    double best_f = std::numeric_limits<double>::infinity();
    const double step = (log10_kappa_hi - log10_kappa_lo) / double(scan_points - 1);
    for (int i = 0; i < scan_points; ++i) {
        const double l = log10_kappa_lo + step * double(i);
        const double f = fn(l);
        if (f < best_f) {
            best_f = f;
            best_l = l;
        }
    }
    if (!std::isfinite(best_f)) return {best_l, best_f};
    const double lo = std::max(log10_kappa_lo, best_l - step);
    const double hi = std::min(log10_kappa_hi, best_l + step);
    auto [gl, gf] = golden_min(fn, lo, hi);
    if (gf < best_f) {
        best_f = gf;
        best_l = gl;
    }
    // parabolic polish on a tight local triple
    const double h = 5e-5;
    const double la = best_l - h, lb = best_l + h;
    if (la > log10_kappa_lo && lb < log10_kappa_hi) {
        const double fa = fn(la), fb = fn(lb);
        const double denom = fa - 2.0 * best_f + fb;
        if (std::isfinite(fa) && std::isfinite(fb) && denom > 0.0) {
            const double vertex = best_l + 0.5 * h * (fa - fb) / denom;
            if (vertex > log10_kappa_lo && vertex < log10_kappa_hi &&
                std::abs(vertex - best_l) < 0.5) {
                const double fv = fn(vertex);
                if (fv < best_f) {
                    best_f = fv;
                    best_l = vertex;
                }
            }
        }
    }
    return {best_l, best_f};
}

inline int candidate_class_rank(const std::string& model) {
    if (model == "shadowed_int") return 0;
    if (model == "rician") return 1;
    return 2;
}

/// Deterministic candidate ordering: epsilon, then model class, then smaller
/// mu, m, kappa.
inline bool candidate_before(const FitCandidate& a, const FitCandidate& b) {
    if (a.epsilon != b.epsilon) return a.epsilon < b.epsilon;
    const int ra = candidate_class_rank(a.model), rb = candidate_class_rank(b.model);
    if (ra != rb) return ra < rb;
    if (a.mu.value_or(0) != b.mu.value_or(0)) return a.mu.value_or(0) < b.mu.value_or(0);
    if (a.m.value_or(0) != b.m.value_or(0)) return a.m.value_or(0) < b.m.value_or(0);
    return a.kappa.value_or(0.0) < b.kappa.value_or(0.0);
}

}  // namespace detail

/// Fits the integer-parameter shadowed model (and the requested baselines) by
/// minimizing the error factor. gamma_bar is pinned to the sample mean; kappa
/// is optimized per integer (mu, m) cell on a log scale.
inline FitResult fit(const EmpiricalSample& sample, int mu_max, int m_max,
                     ModelSet models = {}) {
    if (mu_max < 1 || mu_max > 50 || m_max < 1 || m_max > 50)
        throw InvalidParamsError("fit: mu_max and m_max must lie in [1, 50]");
    CompensatedSum mean;
    for (double v : sample.values) mean.add(v);
    const double gamma_bar = mean.value() / double(sample.n());
    if (!(gamma_bar > 0.0)) throw DegenerateSampleError("fit: sample mean is zero");

    FitResult result;
    result.gamma_bar = gamma_bar;
    result.floor_p = 0.5 / double(sample.n());
    for (std::size_t i : detail::epsilon_grid_indices(sample.n()))
        result.eval_points.push_back(sample.values[i - 1]);

    if (models.shadowed_int) {
        const std::size_t cells = std::size_t(mu_max) * std::size_t(m_max);
        std::vector<FitCandidate> grid(cells);
        parallel_for(cells, [&](std::size_t cell) {
            const int mu = int(cell) / m_max + 1;
            const int m = int(cell) % m_max + 1;
            auto eps_at = [&](double log10_kappa) {
                try {
                    const MixtureModel model =
                        build_mixture({gamma_bar, std::pow(10.0, log10_kappa), mu, m});
                    return epsilon(sample, [&](double x) { return cdf(model, x); });
                } catch (const KappaTooSmallError&) {
                    return std::numeric_limits<double>::infinity();
                } catch (const InternalConsistencyError&) {
                    return std::numeric_limits<double>::infinity();
                }
            };
            const auto [log10_kappa, eps] = detail::kappa_search(eps_at);
            grid[cell] = {"shadowed_int", mu, m, std::pow(10.0, log10_kappa), eps};
        });
        for (auto& cand : grid) result.candidates.push_back(std::move(cand));
    }

    if (models.rician) {
        auto eps_at = [&](double log10_k) {
            const double k_factor = std::pow(10.0, log10_k);
            const std::vector<double> f = quad_cdf_grid(
                [&](double x) { return pdf_kappa_mu(gamma_bar, k_factor, 1.0, x); },
                result.eval_points, {1e-13, 1e-10, 20000});
            // epsilon() visits the grid points ascending, exactly once each,
            // so the precomputed quadrature CDF can be streamed back to it
            std::size_t pos = 0;
            return epsilon(sample, [&](double) { return f[pos++]; });
        };
        const auto [log10_k, eps] = detail::kappa_search(eps_at);
        result.candidates.push_back(
            {"rician", std::nullopt, std::nullopt, std::pow(10.0, log10_k), eps});
    }

    if (models.nakagami) {
        for (int m_hat = 1; m_hat <= m_max; ++m_hat) {
            const double eps = epsilon(
                sample, [&](double x) { return nakagami_cdf(gamma_bar, m_hat, x); });
            result.candidates.push_back({"nakagami", std::nullopt, m_hat, std::nullopt, eps});
        }
    }

    if (result.candidates.empty())
        throw NoFeasibleCandidateError("fit: no model class requested");
    const FitCandidate* best = &result.candidates.front();
    for (const auto& cand : result.candidates)
        if (detail::candidate_before(cand, *best)) best = &cand;
    if (!std::isfinite(best->epsilon))
        throw NoFeasibleCandidateError("fit: every candidate evaluation failed");
    result.best = *best;
    return result;
}

}  // namespace fadekit
