#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace simonlab::testutil {

// Pearson chi-square statistic of observed counts against exact
// probabilities; zero-probability cells must have zero counts.
inline double chi2_statistic(const std::vector<std::uint64_t>& counts,
                             const std::vector<double>& probabilities, double total) {
    double stat = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double expected = probabilities[i] * total;
        if (expected == 0.0) continue;
        const double diff = static_cast<double>(counts[i]) - expected;
        stat += diff * diff / expected;
    }
    return stat;
}

// Wilson-Hilferty approximation of the chi-square quantile at p = 0.99
// (i.e. the acceptance threshold for a p > 0.01 test).
inline double chi2_critical_p99(unsigned df) {
    const double z99 = 2.3263478740;  // standard normal quantile
    const double k = static_cast<double>(df);
    const double term = 1.0 - 2.0 / (9.0 * k) + z99 * std::sqrt(2.0 / (9.0 * k));
    return k * term * term * term;
}

}  // namespace simonlab::testutil
