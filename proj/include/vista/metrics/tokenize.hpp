#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace vista::metrics {

// Lowercase, punctuation isolated into single-character tokens, whitespace collapsed.
// This is the fixed metric-time tokenization; its rule string is part of the metric
// config digest so reports always state what was compared.
inline std::vector<std::string> metric_tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    };
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            flush();
        } else if (std::ispunct(c)) {
            flush();
            tokens.emplace_back(1, static_cast<char>(c));
        } else {
            cur.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    flush();
    return tokens;
}

inline constexpr const char* kMetricTokenizeRule =
    "lowercase; each punctuation char is its own token; whitespace collapsed";

} // namespace vista::metrics
