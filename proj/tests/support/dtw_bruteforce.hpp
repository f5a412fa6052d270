#ifndef ANIMARL_TESTS_DTW_BRUTEFORCE_HPP
#define ANIMARL_TESTS_DTW_BRUTEFORCE_HPP

// Exhaustive enumeration of every admissible warping path (monotone,
// continuous, anchored at both ends); oracle for the dynamic program.

#include <cmath>
#include <limits>
#include <vector>

namespace dtw_oracle {

inline double cost(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

inline void enumerate(const std::vector<std::vector<double>>& a,
                      const std::vector<std::vector<double>>& b, std::size_t i, std::size_t j,
                      double acc, double& best) {
    acc += cost(a[i], b[j]);
    if (acc >= best) return;  // paths only add cost
    if (i + 1 == a.size() && j + 1 == b.size()) {
        best = acc;
        return;
    }
    if (i + 1 < a.size()) enumerate(a, b, i + 1, j, acc, best);
    if (j + 1 < b.size()) enumerate(a, b, i, j + 1, acc, best);
    if (i + 1 < a.size() && j + 1 < b.size()) enumerate(a, b, i + 1, j + 1, acc, best);
}

inline double brute_force_distance(const std::vector<std::vector<double>>& a,
                                   const std::vector<std::vector<double>>& b) {
    double best = std::numeric_limits<double>::infinity();
    enumerate(a, b, 0, 0, 0.0, best);
    return best;
}

}  // namespace dtw_oracle

#endif
