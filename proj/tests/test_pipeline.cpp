#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <sys/wait.h>

#include "test_util.hpp"
#include "vista/pipeline.hpp"

using namespace vista;
using vista_test::TempDir;

namespace {

std::string write_config(const TempDir& tmp, int n_clips, nlohmann::json extra = {}) {
    vista_test::write_file(tmp.str("manifest.jsonl"), vista_test::make_manifest_text(n_clips));
    nlohmann::json cfg = {
        {"manifest", tmp.str("manifest.jsonl")},
        {"frames_dir", tmp.str("frames")},
        {"annotations_dir", tmp.str("annotations")},
        {"dataset_path", tmp.str("dataset.jsonl")},
        {"interval_s", 0.5},
        {"concurrency", 4},
        {"cache_dir", tmp.str("cache")},
        {"seed", 42},
        {"decoder", {{"kind", "synthetic"}}},
        {"scene_provider", {{"name", "mock"}, {"model_id", "mock-scene"}}},
        {"risk_provider", {{"name", "mock"}, {"model_id", "mock-risk"}}},
        {"train",
         {{"epochs", 5},
          {"learning_rate", 10.0},
          {"checkpoint", tmp.str("toy.ckpt")},
          {"trajectory", tmp.str("loss.tsv")},
          {"decode_out", tmp.str("decoded.jsonl")}}},
    };
    for (auto& [k, v] : extra.items()) cfg[k] = v;
    const auto path = tmp.str("config.json");
    vista_test::write_file(path, cfg.dump(2));
    return path;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(VISTA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::map<std::string, std::string> snapshot_dir(const std::filesystem::path& dir) {
    std::map<std::string, std::string> bytes;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
        if (entry.is_regular_file())
            bytes[entry.path().lexically_relative(dir).string()] =
                vista_test::read_file(entry.path().string());
    return bytes;
}

} // namespace

TEST_CASE("sample -> annotate -> build-dataset, byte-stable and cache-silent on rerun") {
    TempDir tmp("pipe");
    const auto cfg_path = write_config(tmp, 10);
    const auto cfg = load_pipeline_config(cfg_path);

    const auto sample1 = cmd_sample(cfg);
    CHECK(sample1.ok());
    CHECK(sample1.clips == 10);
    CHECK(sample1.frames_written > 0);
    for (int i = 0; i < 10; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "clip%03d", i);
        CHECK(std::filesystem::exists(tmp.path() / "frames" / id / "frame_0000.png"));
    }
    // rerun skips complete frame dirs
    const auto sample2 = cmd_sample(cfg);
    CHECK(sample2.skipped_clips == 10);
    CHECK(sample2.frames_written == 0);

    const auto annotate1 = cmd_annotate(cfg);
    CHECK(annotate1.annotated == 10);
    CHECK(annotate1.quarantined == 0);
    CHECK(annotate1.scene_provider_calls == 10);
    CHECK(annotate1.risk_provider_calls == 10);

    const auto build1 = cmd_build_dataset(cfg);
    CHECK(build1.ok());
    CHECK(build1.records == 10);

    const auto annotations_snapshot = snapshot_dir(tmp.path() / "annotations");
    const auto dataset_bytes = vista_test::read_file(tmp.str("dataset.jsonl"));
    CHECK(annotations_snapshot.size() == 12); // 10 clips + quarantine.jsonl + run.json

    // second run: identical bytes, zero provider calls (response cache is warm)
    const auto annotate2 = cmd_annotate(cfg);
    CHECK(annotate2.annotated == 10);
    CHECK(annotate2.scene_provider_calls == 0);
    CHECK(annotate2.risk_provider_calls == 0);
    const auto build2 = cmd_build_dataset(cfg);
    CHECK(build2.records == 10);
    CHECK(snapshot_dir(tmp.path() / "annotations") == annotations_snapshot);
    CHECK(vista_test::read_file(tmp.str("dataset.jsonl")) == dataset_bytes);

    // every annotation is schema-complete and template-conformant
    for (int i = 0; i < 10; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "clip%03d", i);
        std::ifstream in(tmp.path() / "annotations" / (std::string(id) + ".json"));
        const auto j = nlohmann::json::parse(in);
        const auto u = annotation_from_json(j);
        CHECK(u.scene.complete());
        CHECK(u.risk.complete());
        CHECK(template_matches_grammar(u.template_text));
        CHECK(j["provenance"]["seed"] == 42);
        CHECK(j["prompt_version"] == prompts::kPromptVersion);
    }
}

TEST_CASE("injected stage-1 defect quarantines exactly that clip") {
    TempDir tmp("defect");
    const auto cfg_path = write_config(
        tmp, 10,
        {{"mock_defects", nlohmann::json::array({{{"clip_id", "clip003"},
                                                  {"stage", "scene"},
                                                  {"kind", "missing_section"}}})}});
    const auto cfg = load_pipeline_config(cfg_path);
    REQUIRE(cmd_sample(cfg).ok());
    const auto summary = cmd_annotate(cfg);
    CHECK(summary.annotated == 9);
    REQUIRE(summary.quarantined == 1);
    CHECK(summary.quarantine[0].clip_id == "clip003");
    CHECK(summary.quarantine[0].stage == "scene");

    const auto quarantine_lines = vista_test::read_file(tmp.str("annotations/quarantine.jsonl"));
    CHECK(contains(quarantine_lines, "clip003"));
    CHECK_FALSE(std::filesystem::exists(tmp.path() / "annotations" / "clip003.json"));

    const auto build = cmd_build_dataset(cfg);
    CHECK(build.records == 9); // quarantined clip is skipped, not fabricated
}

TEST_CASE("toy-train emits a decreasing trajectory and deterministic checkpoints") {
    TempDir tmp("train");
    const auto cfg_path = write_config(tmp, 10);
    const auto cfg = load_pipeline_config(cfg_path);
    REQUIRE(cmd_sample(cfg).ok());
    REQUIRE(cmd_annotate(cfg).ok());
    REQUIRE(cmd_build_dataset(cfg).ok());

    const auto train1 = cmd_toy_train(cfg);
    CHECK(train1.items == 10);
    REQUIRE(train1.trajectory.size() == 6); // initial + 5 epochs
    CHECK(train1.initial_loss() == Catch::Approx(std::log(train1.vocab_size)).margin(1e-9));
    for (size_t e = 1; e < train1.trajectory.size(); ++e)
        CHECK(train1.trajectory[e] <= train1.trajectory[e - 1] + 1e-12);
    CHECK(train1.final_loss() < train1.initial_loss());

    const auto ckpt_bytes = vista_test::read_file(tmp.str("toy.ckpt"));
    const auto traj_bytes = vista_test::read_file(tmp.str("loss.tsv"));
    const auto decoded_bytes = vista_test::read_file(tmp.str("decoded.jsonl"));
    CHECK(!decoded_bytes.empty());

    const auto train2 = cmd_toy_train(cfg);
    CHECK(vista_test::read_file(tmp.str("toy.ckpt")) == ckpt_bytes);
    CHECK(vista_test::read_file(tmp.str("loss.tsv")) == traj_bytes);
    CHECK(vista_test::read_file(tmp.str("decoded.jsonl")) == decoded_bytes);

    // zero learning rate leaves the (freshly initialized) model un-trained
    auto frozen_cfg = cfg;
    frozen_cfg.train.learning_rate = 0.0;
    const auto frozen = cmd_toy_train(frozen_cfg);
    for (double loss : frozen.trajectory)
        CHECK(loss == Catch::Approx(frozen.trajectory.front()).margin(1e-12));
}

TEST_CASE("evaluate command scores files and writes reports") {
    TempDir tmp("evalcmd");
    const auto cfg_path = write_config(tmp, 6);
    const auto cfg = load_pipeline_config(cfg_path);
    REQUIRE(cmd_sample(cfg).ok());
    REQUIRE(cmd_annotate(cfg).ok());

    // references: template renders of the annotations; candidates: identical
    std::map<std::string, std::string> refs;
    for (int i = 0; i < 6; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "clip%03d", i);
        std::ifstream in(tmp.path() / "annotations" / (std::string(id) + ".json"));
        refs[id] = annotation_from_json(nlohmann::json::parse(in)).template_text;
    }
    eval::write_outputs(tmp.str("refs.jsonl"), refs);
    eval::write_outputs(tmp.str("cands.jsonl"), refs);

    const auto summary = cmd_evaluate(cfg, tmp.str("cands.jsonl"), tmp.str("refs.jsonl"),
                                      tmp.str("report.txt"), "identity");
    CHECK(summary.scored == 6);
    CHECK(summary.bundle.bleu4 == 1.0);
    CHECK(summary.bundle.rouge_l == 1.0);
    const auto report = vista_test::read_file(tmp.str("report.txt"));
    CHECK(contains(report, "identity"));
    CHECK(contains(report, "1.0000"));
    CHECK(std::filesystem::exists(tmp.str("report.txt.manifest.json")));
    CHECK(std::filesystem::exists(tmp.str("report.txt.per_clip.jsonl")));

    auto cands = refs;
    cands.erase("clip002");
    eval::write_outputs(tmp.str("bad.jsonl"), cands);
    CHECK_THROWS(cmd_evaluate(cfg, tmp.str("bad.jsonl"), tmp.str("refs.jsonl"), "", "x"));
}

TEST_CASE("verify command recomputes the published rows") {
    const auto summary = cmd_verify();
    CHECK(summary.checks.size() == 5);
    CHECK(summary.all_passed());
}

TEST_CASE("cli binary drives the full pipeline") {
    TempDir tmp("cli");
    const auto cfg_path = write_config(tmp, 5);

    CHECK(run_cli("verify") == 0);
    CHECK(run_cli("sample --config " + cfg_path) == 0);
    CHECK(run_cli("annotate --config " + cfg_path) == 0);
    CHECK(run_cli("build-dataset --config " + cfg_path) == 0);
    CHECK(std::filesystem::exists(tmp.str("dataset.jsonl")));
    CHECK(run_cli("toy-train --config " + cfg_path) == 0);
    CHECK(std::filesystem::exists(tmp.str("toy.ckpt")));

    // identity evaluation through the CLI
    std::map<std::string, std::string> refs;
    for (int i = 0; i < 5; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "clip%03d", i);
        std::ifstream in(tmp.path() / "annotations" / (std::string(id) + ".json"));
        refs[id] = annotation_from_json(nlohmann::json::parse(in)).template_text;
    }
    eval::write_outputs(tmp.str("refs.jsonl"), refs);
    CHECK(run_cli("evaluate --candidates " + tmp.str("refs.jsonl") + " --references " +
                  tmp.str("refs.jsonl") + " --report " + tmp.str("cli_report.txt")) == 0);
    CHECK(contains(vista_test::read_file(tmp.str("cli_report.txt")), "1.0000"));

    // mismatched clip sets exit nonzero
    auto bad = refs;
    bad.erase("clip001");
    eval::write_outputs(tmp.str("bad.jsonl"), bad);
    CHECK(run_cli("evaluate --candidates " + tmp.str("bad.jsonl") + " --references " +
                  tmp.str("refs.jsonl")) != 0);

    // a config pointing at a missing manifest fails loudly
    CHECK(run_cli("sample --config /nonexistent.json") != 0);

    // seed override flows into provenance
    CHECK(run_cli("sample --config " + cfg_path + " --seed 43") == 0);
}
