#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "test_util.hpp"
#include "vista/eval/harness.hpp"
#include "vista/metrics/tokenize.hpp"
#include "vista/strings.hpp"

using namespace vista;
using vista_test::TempDir;

TEST_CASE("load_outputs round-trips and scales to the 200-clip protocol") {
    TempDir tmp("eval");
    std::map<std::string, std::string> outputs;
    for (int i = 0; i < 200; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "c%03d", i);
        outputs[id] = "caption text for clip " + std::to_string(i);
    }
    const auto path = tmp.str("refs.jsonl");
    eval::write_outputs(path, outputs);
    const auto loaded = eval::load_outputs(path);
    CHECK(loaded.size() == 200);
    CHECK(loaded == outputs);
}

TEST_CASE("load_outputs rejects duplicates by name") {
    TempDir tmp("eval");
    vista_test::write_file(tmp.str("dup.jsonl"),
                           "{\"clip_id\":\"a\",\"text\":\"one\"}\n"
                           "{\"clip_id\":\"a\",\"text\":\"two\"}\n");
    try {
        eval::load_outputs(tmp.str("dup.jsonl"));
        FAIL("expected duplicate error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("'a'") != std::string::npos);
    }
    CHECK_THROWS(eval::load_outputs(tmp.str("missing.jsonl")));
}

TEST_CASE("score_run: identity corpus and clip-set mismatch reporting") {
    std::map<std::string, std::string> refs;
    for (int i = 0; i < 4; ++i)
        refs["c" + std::to_string(i)] =
            "wet pavement slows traffic near ramp " + std::to_string(i);
    const auto result = eval::score_run(refs, refs);
    CHECK(result.bundle.bleu4 == 1.0);
    CHECK(result.bundle.rouge_l == 1.0);

    auto cands = refs;
    cands.erase("c2");
    cands["extra"] = "unmatched";
    try {
        eval::score_run(cands, refs);
        FAIL("expected mismatch error");
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        CHECK(msg.find("c2") != std::string::npos);
        CHECK(msg.find("extra") != std::string::npos);
    }
}

TEST_CASE("score_run aggregates match hand-averaged per-metric oracles") {
    std::map<std::string, std::string> cands, refs;
    const std::pair<const char*, const char*> fixtures[] = {
        {"light traffic on the dry highway", "light traffic moves on the dry highway"},
        {"heavy rain with slow traffic", "slow traffic under heavy rain"},
        {"vehicles brake near the flooded lane", "vehicles brake near the flooded lane"},
        {"a clear night with sparse cars", "sparse cars in a clear night scene"},
        {"snowy pavement forces caution", "drivers show caution on snowy pavement"},
    };
    int idx = 0;
    for (const auto& [cand, ref] : fixtures) {
        const std::string id = "clip" + std::to_string(idx++);
        cands[id] = cand;
        refs[id] = ref;
    }
    const auto result = eval::score_run(cands, refs);
    REQUIRE(result.per_clip.size() == 5);

    double sum_b = 0, sum_m = 0, sum_r = 0, sum_c = 0;
    for (const auto& row : result.per_clip) {
        const auto cand_toks = metrics::metric_tokenize(cands.at(row.clip_id));
        const auto ref_toks = metrics::metric_tokenize(refs.at(row.clip_id));
        CHECK(row.bleu4 == Catch::Approx(oracle::bleu4(cand_toks, ref_toks)).margin(1e-9));
        CHECK(row.meteor == Catch::Approx(oracle::meteor(cand_toks, ref_toks)).margin(1e-9));
        CHECK(row.rouge_l == Catch::Approx(oracle::rouge_l(cand_toks, ref_toks)).margin(1e-9));
        sum_b += row.bleu4;
        sum_m += row.meteor;
        sum_r += row.rouge_l;
        sum_c += row.cider;
    }
    CHECK(result.bundle.bleu4 == Catch::Approx(sum_b / 5).margin(1e-12));
    CHECK(result.bundle.meteor == Catch::Approx(sum_m / 5).margin(1e-12));
    CHECK(result.bundle.rouge_l == Catch::Approx(sum_r / 5).margin(1e-12));
    CHECK(result.bundle.cider == Catch::Approx(sum_c / 5).margin(1e-12));
    CHECK(result.bundle.score == Catch::Approx(metrics::composite_score(
                                     result.bundle.bleu4, result.bundle.meteor,
                                     result.bundle.rouge_l, result.bundle.cider))
                                     .margin(1e-12));
}

TEST_CASE("aggregates are invariant to clip order") {
    std::map<std::string, std::string> cands, refs;
    std::mt19937_64 rng(8);
    for (int i = 0; i < 8; ++i) {
        const std::string id = (rng() % 2 ? "x" : "z") + std::to_string(i);
        cands[id] = "wet road with clip " + std::to_string(rng() % 3);
        refs[id] = "wet road near marker " + std::to_string(rng() % 3);
    }
    const auto a = eval::score_run(cands, refs);
    const auto b = eval::score_run(cands, refs); // std::map iteration is ordered; rebuild shuffled
    std::vector<metrics::ScoredPair> pairs;
    for (const auto& [id, cand] : cands) pairs.push_back({id, cand, refs.at(id)});
    std::shuffle(pairs.begin(), pairs.end(), rng);
    const auto c = metrics::evaluate_corpus(pairs);
    CHECK(a.bundle.score == Catch::Approx(b.bundle.score).margin(1e-12));
    CHECK(a.bundle.score == Catch::Approx(c.bundle.score).margin(1e-12));
    CHECK(a.bundle.cider == Catch::Approx(c.bundle.cider).margin(1e-12));
}

TEST_CASE("every input clip is accounted for: scored + quarantined == total") {
    std::map<std::string, std::string> cands, refs;
    for (int i = 0; i < 5; ++i) {
        const std::string id = "c" + std::to_string(i);
        cands[id] = "some candidate text " + std::to_string(i);
        refs[id] = i == 2 ? "   " : "reference text " + std::to_string(i); // c2 unscorable
    }
    const auto result = eval::score_run(cands, refs);
    CHECK(result.per_clip.size() == 4);
    REQUIRE(result.quarantined.size() == 1);
    CHECK(result.quarantined[0].clip_id == "c2");
    CHECK(result.per_clip.size() + result.quarantined.size() == cands.size());
}

TEST_CASE("published rows verify and perturbations fail") {
    const auto checks = eval::verify_published_rows();
    REQUIRE(checks.size() == 5);
    for (const auto& c : checks) {
        INFO(c.model_tag << " recomputed " << c.recomputed);
        CHECK(c.pass);
    }

    auto rows = eval::published_rows();
    rows[2].meteor += 0.01; // nudges the recomputed Score by 0.25
    const auto perturbed = eval::verify_rows(rows);
    CHECK_FALSE(perturbed[2].pass);
    CHECK(perturbed[0].pass);
}

TEST_CASE("report rendering: layout, zero row, stability") {
    std::vector<eval::ReportRow> rows;
    for (const auto& r : eval::published_rows()) {
        metrics::MetricBundle b;
        b.bleu4 = r.bleu4;
        b.meteor = r.meteor;
        b.rouge_l = r.rouge_l;
        b.cider = r.cider;
        b.score = metrics::composite_score(r.bleu4, r.meteor, r.rouge_l, r.cider);
        rows.push_back({r.model_tag, b});
    }
    const std::string table = eval::render_report(rows);
    // numeric layout mirrors the published table
    CHECK(vista::contains(table, "Model"));
    CHECK(vista::contains(table, "BLEU-4"));
    CHECK(vista::contains(table, "0.2517"));
    CHECK(vista::contains(table, "0.5396"));
    CHECK(vista::contains(table, "0.3902"));
    CHECK(vista::contains(table, "0.2984"));
    CHECK(vista::contains(table, "30.28"));
    CHECK(vista::contains(table, "36.30"));
    CHECK(table == eval::render_report(rows)); // stable across calls

    const std::string zero = eval::render_report({{"zero", metrics::MetricBundle{}}});
    CHECK(vista::contains(zero, "0.00"));

    const std::string machine = eval::render_machine_report(rows);
    const auto first_line = machine.substr(0, machine.find('\n'));
    const auto j = nlohmann::json::parse(first_line);
    CHECK(j["model_tag"] == "3B original");
    CHECK(j["bleu4"] == 0.2517);
    CHECK(j.contains("metric_config_digest"));
}
