#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fadekit {

// ---------------------------------------------------------------------------
// Error types
// ---------------------------------------------------------------------------

struct InvalidParamsError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct KappaTooSmallError : std::domain_error {
    using std::domain_error::domain_error;
};

struct NegativeInputError : std::domain_error {
    using std::domain_error::domain_error;
};

struct NonPositiveInputError : std::domain_error {
    using std::domain_error::domain_error;
};

struct OutOfRegionError : std::domain_error {
    using std::domain_error::domain_error;
};

struct NoConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RegimeMismatchError : std::logic_error {
    using std::logic_error::logic_error;
};

struct MetricEvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InternalConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    std::size_t line;
    ParseError(std::size_t line_no, const std::string& what_arg)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what_arg),
          line(line_no) {}
};

struct TooFewSamplesError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateSampleError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NoFeasibleCandidateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Compensated (Neumaier) summation
// ---------------------------------------------------------------------------

/// Running sum with first-order error compensation. Accurate for long series
/// and for mixed-sign sums with moderate cancellation.
class CompensatedSum {
  public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }

    CompensatedSum& operator+=(double v) {
        add(v);
        return *this;
    }

    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// ---------------------------------------------------------------------------
// Small numeric helpers
// ---------------------------------------------------------------------------

/// log of the binomial coefficient C(n, k) for 0 <= k <= n.
inline double log_binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) throw std::invalid_argument("log_binomial: k out of range");
    return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
           std::lgamma(double(n - k) + 1.0);
}

/// n points spaced linearly on [lo, hi], endpoints included (n >= 2), or {lo}.
inline std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    if (n == 0) throw std::invalid_argument("linear_grid: n must be >= 1");
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    const double step = (hi - lo) / double(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + step * double(i);
    g.back() = hi;
    return g;
}

/// n points spaced logarithmically on [lo, hi], lo > 0.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > 0.0))
        throw std::invalid_argument("log_grid: bounds must be positive");
    std::vector<double> g = linear_grid(std::log(lo), std::log(hi), n);
    for (double& x : g) x = std::exp(x);
    if (n >= 2) {
        g.front() = lo;
        g.back() = hi;
    }
    return g;
}

// ---------------------------------------------------------------------------
// Parallel loop with the FADEKIT_THREADS cap
// ---------------------------------------------------------------------------

/// Thread cap from the environment: FADEKIT_THREADS (0 or unset = auto).
inline unsigned thread_cap() {
    const char* env = std::getenv("FADEKIT_THREADS");
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (env == nullptr) return hw;
    const long v = std::strtol(env, nullptr, 10);
    if (v <= 0) return hw;
    return static_cast<unsigned>(v);
}

/// Runs fn(i) for i in [0, n). Results must be written to disjoint slots so
/// the outcome is independent of scheduling.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const unsigned threads = std::min<std::size_t>(thread_cap(), n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += threads) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fadekit
