#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace vista::metrics {

using Tokens = std::vector<std::string>;

namespace detail {

// n-gram keyed by joining tokens with '\x1f' (never appears in tokens).
inline std::unordered_map<std::string, int> ngram_counts(std::span<const std::string> toks, int n) {
    std::unordered_map<std::string, int> counts;
    if (static_cast<int>(toks.size()) < n) return counts;
    for (size_t i = 0; i + n <= toks.size(); ++i) {
        std::string key = toks[i];
        for (int j = 1; j < n; ++j) {
            key.push_back('\x1f');
            key += toks[i + j];
        }
        ++counts[key];
    }
    return counts;
}

} // namespace detail

// BLEU-4: geometric mean of clipped 1..4-gram precisions times the brevity penalty.
// No smoothing; a zero precision at any order yields 0.
inline double bleu4(std::span<const std::string> cand, std::span<const std::string> ref) {
    if (cand.empty() || ref.empty()) return 0.0;
    double log_sum = 0.0;
    for (int n = 1; n <= 4; ++n) {
        const auto cg = detail::ngram_counts(cand, n);
        const auto rg = detail::ngram_counts(ref, n);
        long total = 0, clipped = 0;
        for (const auto& [gram, count] : cg) {
            total += count;
            auto it = rg.find(gram);
            if (it != rg.end()) clipped += count < it->second ? count : it->second;
        }
        if (total == 0 || clipped == 0) return 0.0;
        log_sum += 0.25 * std::log(static_cast<double>(clipped) / static_cast<double>(total));
    }
    const double c = static_cast<double>(cand.size());
    const double r = static_cast<double>(ref.size());
    const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
    return bp * std::exp(log_sum);
}

} // namespace vista::metrics
