#pragma once

#include "vamp/rng.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace testsupport {

inline double mean(const std::vector<double>& xs) {
    double total = 0.0;
    for (const double x : xs) total += x;
    return total / static_cast<double>(xs.size());
}

inline double sample_std(const std::vector<double>& xs) {
    const double m = mean(xs);
    double ss = 0.0;
    for (const double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

inline double standard_error(const std::vector<double>& xs) {
    return sample_std(xs) / std::sqrt(static_cast<double>(xs.size()));
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean(a);
    const double mb = mean(b);
    double cov = 0.0;
    double va = 0.0;
    double vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return cov / std::sqrt(va * vb);
}

/// Indices of one bootstrap resample (size n, drawn with replacement).
inline std::vector<std::size_t> bootstrap_indices(vamp::RngStream& rng, std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.uniform_below(n));
    return idx;
}

} // namespace testsupport
