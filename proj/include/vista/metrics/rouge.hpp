#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

namespace vista::metrics {

namespace detail {

inline int lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
    const size_t n = a.size(), m = b.size();
    std::vector<int> prev(m + 1, 0), cur(m + 1, 0);
    for (size_t i = 1; i <= n; ++i) {
        for (size_t j = 1; j <= m; ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                          : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

} // namespace detail

// F1-based ROUGE-L (beta = 1): harmonic mean of LCS recall and precision.
inline double rouge_l(std::span<const std::string> cand, std::span<const std::string> ref) {
    if (cand.empty() || ref.empty()) return 0.0;
    const int lcs = detail::lcs_length(cand, ref);
    if (lcs == 0) return 0.0;
    const double r = static_cast<double>(lcs) / static_cast<double>(ref.size());
    const double p = static_cast<double>(lcs) / static_cast<double>(cand.size());
    return 2.0 * r * p / (r + p);
}

} // namespace vista::metrics
