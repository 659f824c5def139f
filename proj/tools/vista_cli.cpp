// vista: multi-agent traffic-video annotation, SFT dataset construction, toy
// distillation training, and caption-metric evaluation in one binary.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vista/pipeline.hpp"
#include "vista/version.hpp"

namespace {

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<size_t> concurrency;
    std::optional<std::string> cache_dir;
    bool keep_going = false;
};

vista::PipelineConfig load_config(const GlobalOptions& g) {
    if (g.config_path.empty()) throw std::runtime_error("--config is required for this subcommand");
    auto cfg = vista::load_pipeline_config(g.config_path, g.seed, g.concurrency, g.cache_dir);
    cfg.keep_going = g.keep_going;
    return cfg;
}

int run_sample(const GlobalOptions& g) {
    const auto cfg = load_config(g);
    const auto summary = vista::cmd_sample(cfg);
    for (const auto& issue : summary.manifest_issues)
        std::cerr << "manifest row " << issue.row << ": " << issue.reason << "\n";
    for (const auto& f : summary.failures)
        std::cerr << "clip " << f.clip_id << ": " << f.detail << "\n";
    std::cout << "sample: clips=" << summary.clips << " frames_written=" << summary.frames_written
              << " skipped=" << summary.skipped_clips
              << " manifest_issues=" << summary.manifest_issues.size()
              << " failures=" << summary.failures.size() << "\n";
    return summary.ok() || cfg.keep_going ? 0 : 1;
}

int run_annotate(const GlobalOptions& g) {
    const auto cfg = load_config(g);
    const auto summary = vista::cmd_annotate(cfg);
    for (const auto& rec : summary.quarantine)
        std::cerr << "quarantined " << rec.clip_id << " at stage " << rec.stage << " ("
                  << rec.error_kind << ")\n";
    std::cout << "annotate: annotated=" << summary.annotated
              << " quarantined=" << summary.quarantined
              << " scene_provider_calls=" << summary.scene_provider_calls
              << " risk_provider_calls=" << summary.risk_provider_calls << "\n";
    if (summary.ok() || cfg.keep_going) return 0;
    return static_cast<int>(summary.quarantined > 100 ? 100 : summary.quarantined);
}

int run_build_dataset(const GlobalOptions& g) {
    const auto cfg = load_config(g);
    const auto summary = vista::cmd_build_dataset(cfg);
    for (const auto& e : summary.errors) std::cerr << "dataset: " << e << "\n";
    std::cout << "build-dataset: records=" << summary.records << " errors=" << summary.errors.size()
              << " path=" << cfg.dataset_path << "\n";
    return summary.ok() || cfg.keep_going ? 0 : 1;
}

int run_toy_train(const GlobalOptions& g) {
    const auto cfg = load_config(g);
    const auto summary = vista::cmd_toy_train(cfg);
    std::printf("toy-train: items=%zu vocab=%d epochs=%zu initial_loss=%.6f final_loss=%.6f\n",
                summary.items, summary.vocab_size,
                summary.trajectory.empty() ? 0 : summary.trajectory.size() - 1,
                summary.initial_loss(), summary.final_loss());
    std::cout << "checkpoint: " << summary.checkpoint_path << "\n";
    return 0;
}

int run_evaluate(const GlobalOptions& g, const std::string& candidates,
                 const std::string& references, const std::string& report,
                 const std::string& model_tag) {
    vista::PipelineConfig cfg;
    if (!g.config_path.empty()) cfg = load_config(g);
    const auto summary = vista::cmd_evaluate(cfg, candidates, references, report, model_tag);
    const std::vector<vista::eval::ReportRow> rows{{model_tag, summary.bundle}};
    std::cout << vista::eval::render_report(rows);
    std::cout << "scored clips: " << summary.scored << ", quarantined: " << summary.quarantined
              << "\n";
    if (!report.empty()) std::cout << "report written to " << report << "\n";
    return 0;
}

int run_verify() {
    const auto summary = vista::cmd_verify();
    for (const auto& c : summary.checks)
        std::printf("[%s] %s: recomputed %.4f vs published %.2f\n", c.pass ? "PASS" : "FAIL",
                    c.model_tag.c_str(), c.recomputed, c.published);
    return summary.all_passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vista: multi-agent traffic annotation and distillation pipeline"};
    app.set_version_flag("--version", vista::kToolVersion);
    app.require_subcommand(1);

    GlobalOptions g;
    std::uint64_t seed_value = 0;
    size_t concurrency_value = 0;
    std::string cache_dir_value;
    app.add_option("--config", g.config_path, "pipeline config JSON");
    auto* seed_opt = app.add_option("--seed", seed_value, "seed for all randomness");
    auto* conc_opt = app.add_option("--concurrency", concurrency_value, "in-flight clip cap");
    auto* cache_opt = app.add_option("--cache-dir", cache_dir_value, "response/decode cache root");
    app.add_flag("--keep-going", g.keep_going, "exit 0 even when some clips fail");

    auto* sample = app.add_subcommand("sample", "sample frames from every manifest clip");
    auto* annotate = app.add_subcommand("annotate", "run the two-stage agent pipeline");
    auto* build = app.add_subcommand("build-dataset", "emit the SFT dataset from annotations");
    auto* train = app.add_subcommand("toy-train", "train the toy student on the dataset");
    auto* evaluate = app.add_subcommand("evaluate", "score candidates against references");
    auto* verify = app.add_subcommand("verify", "recompute the published composite scores");
    for (auto* sub : {sample, annotate, build, train, evaluate, verify})
        sub->fallthrough(); // global flags may follow the subcommand name

    std::string candidates, references, report, model_tag = "candidate";
    evaluate->add_option("--candidates", candidates, "candidate {clip_id, text} JSONL")->required();
    evaluate->add_option("--references", references, "reference {clip_id, text} JSONL")->required();
    evaluate->add_option("--report", report, "write the report to this path");
    evaluate->add_option("--model-tag", model_tag, "row label in the report");

    CLI11_PARSE(app, argc, argv);

    if (seed_opt->count()) g.seed = seed_value;
    if (conc_opt->count()) g.concurrency = concurrency_value;
    if (cache_opt->count()) g.cache_dir = cache_dir_value;

    try {
        if (sample->parsed()) return run_sample(g);
        if (annotate->parsed()) return run_annotate(g);
        if (build->parsed()) return run_build_dataset(g);
        if (train->parsed()) return run_toy_train(g);
        if (evaluate->parsed()) return run_evaluate(g, candidates, references, report, model_tag);
        if (verify->parsed()) return run_verify();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
