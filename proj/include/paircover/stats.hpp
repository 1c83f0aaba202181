#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "paircover/errors.hpp"

namespace paircover {

struct WilsonInterval {
    double low = 0.0;
    double high = 0.0;
};

/// Wilson score interval for a binomial proportion (default 95%).
inline WilsonInterval wilson_interval(long long successes, long long trials, double z = 1.959963984540054) {
    if (trials <= 0) throw InvalidArgument("wilson_interval: trials must be positive");
    const double n = static_cast<double>(trials);
    const double w = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (w + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(w * (1.0 - w) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

inline double median(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("median: empty sample");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidArgument("fit_line: need >= 2 matching points");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw InvalidArgument("fit_line: degenerate x values");
    return {sxy / sxx, my - (sxy / sxx) * mx};
}

inline double chi_square_statistic(std::span<const long long> observed, std::span<const double> expected) {
    if (observed.size() != expected.size() || observed.empty()) {
        throw InvalidArgument("chi_square_statistic: size mismatch");
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double diff = static_cast<double>(observed[i]) - expected[i];
        stat += diff * diff / expected[i];
    }
    return stat;
}

} // namespace paircover
