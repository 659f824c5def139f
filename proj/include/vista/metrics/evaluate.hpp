#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "vista/metrics/bleu.hpp"
#include "vista/metrics/cider.hpp"
#include "vista/metrics/meteor.hpp"
#include "vista/metrics/rouge.hpp"
#include "vista/metrics/tokenize.hpp"

namespace vista::metrics {

struct MetricBundle {
    double bleu4 = 0.0;
    double meteor = 0.0;
    double rouge_l = 0.0;
    double cider = 0.0;
    double score = 0.0;
};

// Score = (BLEU-4 + METEOR + ROUGE-L + 0.1 * CIDEr) / 4 * 100.
inline double composite_score(double bleu4, double meteor, double rouge_l, double cider) {
    return (bleu4 + meteor + rouge_l + 0.1 * cider) / 4.0 * 100.0;
}

struct ScoredPair {
    std::string clip_id;
    std::string candidate;
    std::string reference;
};

struct ClipScore {
    std::string clip_id;
    double bleu4 = 0.0;
    double meteor = 0.0;
    double rouge_l = 0.0;
    double cider = 0.0;
};

struct QuarantinedClip {
    std::string clip_id;
    std::string reason;
};

struct CorpusResult {
    MetricBundle bundle;
    std::vector<ClipScore> per_clip;
    std::vector<QuarantinedClip> quarantined;
};

// BLEU/METEOR/ROUGE averaged per clip; CIDEr idf built corpus-level over the scored
// references, then per-clip scores averaged. Clips whose reference tokenizes to
// nothing cannot be scored and are quarantined; empty candidates score 0.
inline CorpusResult evaluate_corpus(const std::vector<ScoredPair>& pairs) {
    if (pairs.empty()) throw std::invalid_argument("evaluate_corpus: empty corpus");
    CorpusResult result;
    std::vector<Tokens> cand_toks, ref_toks;
    std::vector<std::string> ids;
    for (const auto& p : pairs) {
        Tokens ref = metric_tokenize(p.reference);
        if (ref.empty()) {
            result.quarantined.push_back({p.clip_id, "reference tokenizes to empty"});
            continue;
        }
        cand_toks.push_back(metric_tokenize(p.candidate));
        ref_toks.push_back(std::move(ref));
        ids.push_back(p.clip_id);
    }
    if (ids.empty()) throw std::runtime_error("evaluate_corpus: every clip quarantined");

    CiderScorer cider_scorer(ref_toks);
    double sum_b = 0.0, sum_m = 0.0, sum_r = 0.0, sum_c = 0.0;
    result.per_clip.reserve(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) {
        ClipScore row;
        row.clip_id = ids[i];
        row.bleu4 = bleu4(cand_toks[i], ref_toks[i]);
        row.meteor = meteor(cand_toks[i], ref_toks[i]);
        row.rouge_l = cand_toks[i].empty() ? 0.0 : rouge_l(cand_toks[i], ref_toks[i]);
        row.cider = cider_scorer.score_pair(cand_toks[i], ref_toks[i]);
        sum_b += row.bleu4;
        sum_m += row.meteor;
        sum_r += row.rouge_l;
        sum_c += row.cider;
        result.per_clip.push_back(std::move(row));
    }
    const double n = static_cast<double>(ids.size());
    result.bundle.bleu4 = sum_b / n;
    result.bundle.meteor = sum_m / n;
    result.bundle.rouge_l = sum_r / n;
    result.bundle.cider = sum_c / n;
    result.bundle.score = composite_score(result.bundle.bleu4, result.bundle.meteor,
                                          result.bundle.rouge_l, result.bundle.cider);
    return result;
}

// Pinned description of every metric decision; reports carry its digest so two runs
// are comparable only when they scored the same way.
inline std::string metric_config_description() {
    return std::string("metric-tokenize{") + kMetricTokenizeRule +
           "};bleu4{clipped,n=4,uniform,no-smoothing,bp=exp(1-r/c) if c<=r};"
           "meteor{exact-match,F=10PR/(R+9P),penalty=0.5*(ch/m)^3,min-chunk-bnb};"
           "rouge-l{f1,beta=1};"
           "cider{plain,n=1..4,idf=log(N/max(1,df)),ref-corpus-idf,per-clip-mean};"
           "score{(b+m+r+0.1c)/4*100}";
}

} // namespace vista::metrics
