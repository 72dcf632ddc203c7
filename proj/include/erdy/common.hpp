#ifndef ERDY_COMMON_HPP
#define ERDY_COMMON_HPP

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace erdy {

/// Format tag written as the first comment line of every output file.
inline constexpr const char* format_tag = "erdy-meanfield config-v1";

/// Invalid configuration, bad user input, or precondition violation.
/// The CLI maps this to exit code 2.
class invalid_config : public std::runtime_error {
public:
    explicit invalid_config(const std::string& msg) : std::runtime_error(msg) {}
};

/// Request exceeds a configured capacity limit (e.g. exact pair sums on large graphs).
class capacity_error : public invalid_config {
public:
    explicit capacity_error(const std::string& msg) : invalid_config(msg) {}
};

/// A user-supplied rate model returned a negative off-diagonal rate.
class model_contract_error : public std::runtime_error {
public:
    explicit model_contract_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Adaptive integration failed (step-size underflow, non-finite state).
class integration_error : public std::runtime_error {
public:
    explicit integration_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline double l1_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

inline double l1_dist(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw invalid_config("l1_dist: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

/// Uniform grid over [0, horizon] with `points` entries, endpoints included.
/// Every module that shares a grid builds it through this helper so the
/// time stamps compare bit-for-bit.
inline std::vector<double> uniform_grid(double horizon, int points) {
    if (points < 2)
        throw invalid_config("uniform_grid: need at least 2 sample points");
    std::vector<double> t(static_cast<std::size_t>(points));
    for (int g = 0; g < points; ++g)
        t[static_cast<std::size_t>(g)] = horizon * static_cast<double>(g) / static_cast<double>(points - 1);
    t.back() = horizon;
    return t;
}

namespace detail {
template <class F>
double pairwise_sum_impl(std::size_t lo, std::size_t hi, F&& f) {
    const std::size_t n = hi - lo;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += f(i);
        return s;
    }
    const std::size_t mid = lo + n / 2;
    return pairwise_sum_impl(lo, mid, f) + pairwise_sum_impl(mid, hi, f);
}
} // namespace detail

/// Fixed-order pairwise summation: bit-stable regardless of thread count
/// (callers evaluate it serially) and more accurate than a running sum.
template <class F>
double pairwise_sum(std::size_t n, F&& f) {
    if (n == 0) return 0.0;
    return detail::pairwise_sum_impl(0, n, f);
}

inline double pairwise_sum(std::span<const double> v) {
    return pairwise_sum(v.size(), [&](std::size_t i) { return v[i]; });
}

/// Shortest decimal form that round-trips a double (17 significant digits).
inline std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace erdy

#endif
