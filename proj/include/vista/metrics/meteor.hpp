#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace vista::metrics {

struct MeteorAlignment {
    int matches = 0;
    int chunks = 0;
    bool exact = true; // false when the chunk search hit its node budget
};

namespace detail {

struct ChunkSearch {
    std::vector<int> cand, ref;      // interned token ids
    std::vector<char> avail_r;
    std::vector<int> need;           // per word id, matches still required
    std::vector<int> rem_c;          // per word id, candidate occurrences not yet decided
    int total_need = 0;
    int best = 0;                    // best (lowest) chunk count found
    bool have_solution = false;
    int max_block = 1;               // longest common substring, bounds any block
    long budget = 0;

    // Longest common substring length via DP over interned ids.
    void compute_max_block() {
        const int n = static_cast<int>(cand.size()), m = static_cast<int>(ref.size());
        std::vector<int> prev(m + 1, 0), cur(m + 1, 0);
        int best_len = 1;
        for (int i = 1; i <= n; ++i) {
            for (int j = 1; j <= m; ++j) {
                cur[j] = cand[i - 1] == ref[j - 1] ? prev[j - 1] + 1 : 0;
                if (cur[j] > best_len) best_len = cur[j];
            }
            std::swap(prev, cur);
        }
        max_block = best_len;
    }

    void dfs(int p, int blocks, int matched) {
        if (budget-- <= 0 && have_solution) return;
        if (total_need - matched == 0) {
            if (!have_solution || blocks < best) {
                best = blocks;
                have_solution = true;
            }
            return;
        }
        if (p >= static_cast<int>(cand.size())) return;
        // Admissible bound: every further block covers at most max_block tokens.
        const int remaining = total_need - matched;
        if (have_solution && blocks + (remaining + max_block - 1) / max_block >= best) return;

        const int w = cand[p];
        if (need[w] == 0) {
            --rem_c[w];
            dfs(p + 1, blocks, matched);
            ++rem_c[w];
            return;
        }
        // Enumerate block placements starting at p, longest first.
        std::vector<std::pair<int, int>> placements; // (len, ref start)
        for (int j = 0; j < static_cast<int>(ref.size()); ++j) {
            if (!avail_r[j] || ref[j] != w) continue;
            int len = 0;
            while (p + len < static_cast<int>(cand.size()) &&
                   j + len < static_cast<int>(ref.size()) && avail_r[j + len] &&
                   cand[p + len] == ref[j + len] && need[cand[p + len]] > 0)
                ++len;
            for (int l = len; l >= 1; --l) placements.emplace_back(l, j);
        }
        std::stable_sort(placements.begin(), placements.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (const auto& [len, j] : placements) {
            for (int k = 0; k < len; ++k) {
                avail_r[j + k] = 0;
                --need[cand[p + k]];
                --rem_c[cand[p + k]];
            }
            dfs(p + len, blocks + 1, matched + len);
            for (int k = 0; k < len; ++k) {
                avail_r[j + k] = 1;
                ++need[cand[p + k]];
                ++rem_c[cand[p + k]];
            }
        }
        if (rem_c[w] - 1 >= need[w]) { // enough later copies to still reach the maximum
            --rem_c[w];
            dfs(p + 1, blocks, matched);
            ++rem_c[w];
        }
    }
};

} // namespace detail

// Exact-match alignment maximizing matched unigrams, then minimizing chunk count
// (a chunk is a maximal run of pairs contiguous in both sequences). Branch and
// bound with longest-block-first ordering. node_budget == 0 picks an automatic
// budget: generous (exact in practice) for short inputs, bounded for long ones,
// where the first longest-block-first descent already lands near the optimum.
inline MeteorAlignment meteor_align(std::span<const std::string> cand,
                                    std::span<const std::string> ref,
                                    long node_budget = 0) {
    if (node_budget == 0) {
        const long total = static_cast<long>(cand.size() + ref.size()) + 1;
        node_budget = std::max<long>(50000, 4000000 / total);
    }
    std::unordered_map<std::string, int> intern;
    auto to_ids = [&](std::span<const std::string> toks) {
        std::vector<int> ids;
        ids.reserve(toks.size());
        for (const auto& t : toks) {
            auto [it, _] = intern.try_emplace(t, static_cast<int>(intern.size()));
            ids.push_back(it->second);
        }
        return ids;
    };
    detail::ChunkSearch s;
    s.cand = to_ids(cand);
    s.ref = to_ids(ref);
    const int nwords = static_cast<int>(intern.size());
    std::vector<int> count_c(nwords, 0), count_r(nwords, 0);
    for (int w : s.cand) ++count_c[w];
    for (int w : s.ref) ++count_r[w];
    s.need.resize(nwords);
    s.rem_c = count_c;
    for (int w = 0; w < nwords; ++w) {
        s.need[w] = std::min(count_c[w], count_r[w]);
        s.total_need += s.need[w];
    }
    if (s.total_need == 0) return {0, 0, true};
    s.avail_r.assign(s.ref.size(), 1);
    s.budget = node_budget;
    s.compute_max_block();
    s.dfs(0, 0, 0);
    return {s.total_need, s.best, s.budget > 0};
}

// METEOR with the original exact-match parameters: F_mean = 10PR / (R + 9P),
// penalty = 0.5 * (chunks / matches)^3.
inline double meteor(std::span<const std::string> cand, std::span<const std::string> ref) {
    if (cand.empty() || ref.empty()) return 0.0;
    const MeteorAlignment a = meteor_align(cand, ref);
    if (a.matches == 0) return 0.0;
    const double m = static_cast<double>(a.matches);
    const double precision = m / static_cast<double>(cand.size());
    const double recall = m / static_cast<double>(ref.size());
    const double f_mean = 10.0 * precision * recall / (recall + 9.0 * precision);
    const double frag = static_cast<double>(a.chunks) / m;
    const double penalty = 0.5 * frag * frag * frag;
    return f_mean * (1.0 - penalty);
}

} // namespace vista::metrics
