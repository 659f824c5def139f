#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "vista/metrics/bleu.hpp" // ngram_counts

namespace vista::metrics {

// Plain CIDEr over single-reference pairs: per clip, the mean over n = 1..4 of the
// cosine similarity between TF-IDF n-gram vectors of candidate and reference. The
// idf table is built once from the reference corpus, idf = log(N / df) with df
// floored at 1; a zero vector on either side makes that order's cosine 0. No x10
// rescaling and no length penalty.
class CiderScorer {
public:
    explicit CiderScorer(const std::vector<Tokens>& references) {
        if (references.empty()) throw std::invalid_argument("cider: empty reference corpus");
        n_docs_ = references.size();
        for (int n = 1; n <= 4; ++n) {
            auto& df = df_[n - 1];
            for (const auto& ref : references) {
                const auto counts = detail::ngram_counts(ref, n);
                for (const auto& [gram, _] : counts) ++df[gram];
            }
        }
    }

    double score_pair(std::span<const std::string> cand, std::span<const std::string> ref) const {
        double total = 0.0;
        for (int n = 1; n <= 4; ++n) {
            const auto vc = tfidf(cand, n);
            const auto vr = tfidf(ref, n);
            total += cosine(vc, vr);
        }
        return total / 4.0;
    }

    size_t corpus_size() const { return n_docs_; }

private:
    using Vec = std::unordered_map<std::string, double>;

    Vec tfidf(std::span<const std::string> toks, int n) const {
        Vec v;
        const auto counts = detail::ngram_counts(toks, n);
        const auto& df = df_[n - 1];
        for (const auto& [gram, count] : counts) {
            auto it = df.find(gram);
            const double d = it == df.end() ? 1.0 : static_cast<double>(std::max(1, it->second));
            v[gram] = static_cast<double>(count) * std::log(static_cast<double>(n_docs_) / d);
        }
        return v;
    }

    static double cosine(const Vec& a, const Vec& b) {
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (const auto& [gram, va] : a) {
            na += va * va;
            auto it = b.find(gram);
            if (it != b.end()) dot += va * it->second;
        }
        for (const auto& [_, vb] : b) nb += vb * vb;
        if (na == 0.0 || nb == 0.0) return 0.0;
        return dot / (std::sqrt(na) * std::sqrt(nb));
    }

    size_t n_docs_ = 0;
    std::unordered_map<std::string, int> df_[4];
};

// Corpus-level convenience: per-clip scores plus their mean.
struct CiderResult {
    std::vector<double> per_clip;
    double mean = 0.0;
};

inline CiderResult cider(const std::vector<Tokens>& candidates,
                         const std::vector<Tokens>& references) {
    if (candidates.size() != references.size())
        throw std::invalid_argument("cider: candidate/reference count mismatch");
    CiderScorer scorer(references);
    CiderResult out;
    out.per_clip.reserve(candidates.size());
    double sum = 0.0;
    for (size_t i = 0; i < candidates.size(); ++i) {
        const double s = scorer.score_pair(candidates[i], references[i]);
        out.per_clip.push_back(s);
        sum += s;
    }
    out.mean = sum / static_cast<double>(candidates.size());
    return out;
}

} // namespace vista::metrics
