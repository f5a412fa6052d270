#ifndef ANIMARL_STATS_UTIL_HPP
#define ANIMARL_STATS_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "animarl/errors.hpp"

namespace animarl {

// Lower median: the ceil(n/2)-th smallest value; deterministic for even n.
inline double lower_median(std::vector<double> values) {
    if (values.empty()) throw ContractError("lower_median: empty input");
    std::size_t k = (values.size() - 1) / 2;
    std::nth_element(values.begin(), values.begin() + k, values.end());
    return values[k];
}

// Linearly interpolated quantile of sorted data, p in [0,1].
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw ContractError("quantile: empty input");
    if (sorted.size() == 1) return sorted[0];
    double pos = p * static_cast<double>(sorted.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, p);
}

inline double mean_of(const std::vector<double>& v) {
    if (v.empty()) throw ContractError("mean_of: empty input");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Unbiased sample variance.
inline double variance_of(const std::vector<double>& v) {
    if (v.size() < 2) throw ContractError("variance_of: need at least 2 samples");
    double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace animarl

#endif
