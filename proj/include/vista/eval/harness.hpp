#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vista/digest.hpp"
#include "vista/metrics/evaluate.hpp"

namespace vista::eval {

// Line-delimited {clip_id, text} records. Duplicates are an error; text survives
// byte-exact.
inline std::map<std::string, std::string> load_outputs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_outputs: cannot open " + path);
    std::map<std::string, std::string> out;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error("load_outputs: " + path + " line " + std::to_string(row) +
                                     ": " + e.what());
        }
        if (!j.contains("clip_id") || !j.contains("text"))
            throw std::runtime_error("load_outputs: " + path + " line " + std::to_string(row) +
                                     ": record needs clip_id and text");
        const std::string id = j["clip_id"].get<std::string>();
        if (!out.emplace(id, j["text"].get<std::string>()).second)
            throw std::runtime_error("load_outputs: duplicate clip_id '" + id + "' in " + path);
    }
    return out;
}

inline void write_outputs(const std::string& path,
                          const std::map<std::string, std::string>& outputs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_outputs: cannot write " + path);
    for (const auto& [id, text] : outputs) {
        nlohmann::ordered_json j;
        j["clip_id"] = id;
        j["text"] = text;
        // replace, not throw: undertrained decodes can emit non-UTF-8 byte tokens
        out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << "\n";
    }
}

struct RunManifest {
    std::string run_tag;
    std::string candidate_source;
    std::string reference_source;
    std::vector<std::string> clip_ids;
    std::string metric_config_digest;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["run_tag"] = run_tag;
        j["candidate_source"] = candidate_source;
        j["reference_source"] = reference_source;
        j["clip_ids"] = clip_ids;
        j["metric_config_digest"] = metric_config_digest;
        return j;
    }
};

inline std::string metric_config_digest() {
    return sha256_hex(metrics::metric_config_description());
}

// Scores candidates against references per clip. The clip_id sets must match
// exactly; a mismatch reports the symmetric difference.
inline metrics::CorpusResult score_run(const std::map<std::string, std::string>& candidates,
                                       const std::map<std::string, std::string>& references) {
    std::vector<std::string> missing_refs, missing_cands;
    for (const auto& [id, _] : candidates)
        if (!references.count(id)) missing_refs.push_back(id);
    for (const auto& [id, _] : references)
        if (!candidates.count(id)) missing_cands.push_back(id);
    if (!missing_refs.empty() || !missing_cands.empty()) {
        std::string msg = "score_run: clip sets differ;";
        if (!missing_cands.empty()) {
            msg += " missing candidates:";
            for (const auto& id : missing_cands) msg += " " + id;
            msg += ";";
        }
        if (!missing_refs.empty()) {
            msg += " missing references:";
            for (const auto& id : missing_refs) msg += " " + id;
        }
        throw std::runtime_error(msg);
    }
    std::vector<metrics::ScoredPair> pairs;
    pairs.reserve(candidates.size());
    for (const auto& [id, cand] : candidates) pairs.push_back({id, cand, references.at(id)});
    return metrics::evaluate_corpus(pairs);
}

struct PublishedRow {
    std::string model_tag;
    double bleu4, meteor, rouge_l, cider, score;
};

// Table 1 of the study this pipeline reproduces: four metric columns and the
// composite Score per fine-tuning variant.
inline const std::vector<PublishedRow>& published_rows() {
    static const std::vector<PublishedRow> rows = {
        {"3B original", 0.2517, 0.5396, 0.3902, 0.2984, 30.28},
        {"3B mlp", 0.2581, 0.5287, 0.4040, 0.3363, 30.61},
        {"3B mlp+vision", 0.2722, 0.5281, 0.4346, 0.2413, 31.48},
        {"3B mlp+llm", 0.3269, 0.5691, 0.4862, 0.6712, 36.23},
        {"3B llm+mlp+vision (VISTA)", 0.3289, 0.5634, 0.4895, 0.7014, 36.30},
    };
    return rows;
}

inline constexpr double kPublishedScoreTolerance = 0.005; // published Scores carry 2 decimals

struct RowCheck {
    std::string model_tag;
    double published = 0.0;
    double recomputed = 0.0;
    bool pass = false;
};

inline std::vector<RowCheck> verify_rows(const std::vector<PublishedRow>& rows) {
    std::vector<RowCheck> checks;
    checks.reserve(rows.size());
    for (const auto& r : rows) {
        RowCheck c;
        c.model_tag = r.model_tag;
        c.published = r.score;
        c.recomputed = metrics::composite_score(r.bleu4, r.meteor, r.rouge_l, r.cider);
        c.pass = std::fabs(c.recomputed - c.published) <= kPublishedScoreTolerance;
        checks.push_back(std::move(c));
    }
    return checks;
}

inline std::vector<RowCheck> verify_published_rows() { return verify_rows(published_rows()); }

struct ReportRow {
    std::string model_tag;
    metrics::MetricBundle bundle;
};

// Plain-text table mirroring the published layout: Model, BLEU-4, METEOR, ROUGE-L,
// CIDEr, Score with 4-decimal metrics and 2-decimal Score.
inline std::string render_report(const std::vector<ReportRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("render_report: no rows");
    size_t name_width = std::string("Model").size();
    for (const auto& r : rows) name_width = std::max(name_width, r.model_tag.size());
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof(buf), "%-*s  %7s  %7s  %7s  %7s  %6s\n",
                  static_cast<int>(name_width), "Model", "BLEU-4", "METEOR", "ROUGE-L", "CIDEr",
                  "Score");
    out += buf;
    out += std::string(name_width + 2 + 4 * 9 + 6, '-') + "\n";
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%-*s  %7.4f  %7.4f  %7.4f  %7.4f  %6.2f\n",
                      static_cast<int>(name_width), r.model_tag.c_str(), r.bundle.bleu4,
                      r.bundle.meteor, r.bundle.rouge_l, r.bundle.cider, r.bundle.score);
        out += buf;
    }
    return out;
}

inline std::string render_machine_report(const std::vector<ReportRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("render_machine_report: no rows");
    std::string out;
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["model_tag"] = r.model_tag;
        j["bleu4"] = r.bundle.bleu4;
        j["meteor"] = r.bundle.meteor;
        j["rouge_l"] = r.bundle.rouge_l;
        j["cider"] = r.bundle.cider;
        j["score"] = r.bundle.score;
        j["metric_config_digest"] = metric_config_digest();
        out += j.dump() + "\n";
    }
    return out;
}

} // namespace vista::eval
