#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vista/agent_client.hpp"
#include "vista/concurrency.hpp"
#include "vista/digest.hpp"
#include "vista/eval/harness.hpp"
#include "vista/frame_sampler.hpp"
#include "vista/manifest.hpp"
#include "vista/mock_provider.hpp"
#include "vista/orchestrator.hpp"
#include "vista/provenance.hpp"
#include "vista/sft.hpp"
#include "vista/tokenizer.hpp"
#include "vista/toy/trainer.hpp"
#include "vista/unified.hpp"

namespace vista {

struct TrainSettings {
    int epochs = 5;
    double learning_rate = 10.0;
    std::string checkpoint_path = "toy.ckpt";
    std::string trajectory_path = "loss_trajectory.tsv";
    std::string decode_out; // optional: greedy-decoded candidates, {clip_id, text} lines
    int max_decode_len = 4096;
};

struct DecoderSettings {
    std::string kind = "synthetic"; // synthetic | directory | exec
    std::string frames_root;        // directory decoder: root of pre-extracted frames
    std::string command_template;   // exec decoder: uses {input} {time} {output}
};

struct PipelineConfig {
    std::string manifest_path;
    std::string frames_dir = "frames";
    std::string annotations_dir = "annotations";
    std::string dataset_path = "dataset.jsonl";
    double interval_s = 0.5;
    size_t concurrency = 4;
    std::string cache_dir = "cache";
    std::uint64_t seed = 0;
    bool keep_going = false;
    DecoderSettings decoder;
    ProviderConfig scene_provider;
    ProviderConfig risk_provider;
    std::vector<MockDefect> mock_defects;
    TrainSettings train;
    std::string config_digest; // sha256 of the config file bytes + seed

    Provenance provenance() const {
        Provenance p;
        p.seed = seed;
        p.config_digest = config_digest;
        return p;
    }
};

namespace detail {

inline ProviderConfig provider_from_json(const nlohmann::json& j, const std::string& fallback_name) {
    ProviderConfig cfg;
    cfg.name = j.value("name", fallback_name);
    cfg.endpoint_url = j.value("endpoint_url", "");
    cfg.model_id = j.value("model_id", cfg.name);
    cfg.api_key_env = j.value("api_key_env", "");
    cfg.max_output_tokens = j.value("max_output_tokens", 1024);
    cfg.temperature = j.value("temperature", 0.0);
    cfg.request_timeout_s = j.value("request_timeout_s", 60.0);
    cfg.max_retries = j.value("max_retries", 3);
    cfg.backoff_initial_ms = j.value("backoff_initial_ms", 250);
    return cfg;
}

} // namespace detail

inline PipelineConfig load_pipeline_config(const std::string& path,
                                           std::optional<std::uint64_t> seed_override = {},
                                           std::optional<size_t> concurrency_override = {},
                                           std::optional<std::string> cache_dir_override = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    const std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config: " + path + ": " + e.what());
    }
    PipelineConfig cfg;
    cfg.manifest_path = j.value("manifest", "");
    cfg.frames_dir = j.value("frames_dir", cfg.frames_dir);
    cfg.annotations_dir = j.value("annotations_dir", cfg.annotations_dir);
    cfg.dataset_path = j.value("dataset_path", cfg.dataset_path);
    cfg.interval_s = j.value("interval_s", cfg.interval_s);
    cfg.concurrency = j.value("concurrency", cfg.concurrency);
    cfg.cache_dir = j.value("cache_dir", cfg.cache_dir);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("decoder")) {
        cfg.decoder.kind = j["decoder"].value("kind", "synthetic");
        cfg.decoder.frames_root = j["decoder"].value("frames_root", "");
        cfg.decoder.command_template = j["decoder"].value("command_template", "");
    }
    cfg.scene_provider = j.contains("scene_provider")
                             ? detail::provider_from_json(j["scene_provider"], "mock")
                             : detail::provider_from_json(nlohmann::json::object(), "mock");
    cfg.risk_provider = j.contains("risk_provider")
                            ? detail::provider_from_json(j["risk_provider"], "mock")
                            : detail::provider_from_json(nlohmann::json::object(), "mock");
    if (j.contains("mock_defects")) {
        for (const auto& d : j["mock_defects"]) {
            MockDefect defect;
            defect.clip_id = d.at("clip_id").get<std::string>();
            defect.stage = d.value("stage", "scene") == "risk" ? Stage::risk : Stage::scene;
            defect.kind = mock_defect_kind_from_string(d.value("kind", "missing_section"));
            defect.remaining = d.value("count", 2);
            cfg.mock_defects.push_back(std::move(defect));
        }
    }
    if (j.contains("train")) {
        const auto& t = j["train"];
        cfg.train.epochs = t.value("epochs", cfg.train.epochs);
        cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
        cfg.train.checkpoint_path = t.value("checkpoint", cfg.train.checkpoint_path);
        cfg.train.trajectory_path = t.value("trajectory", cfg.train.trajectory_path);
        cfg.train.decode_out = t.value("decode_out", cfg.train.decode_out);
        cfg.train.max_decode_len = t.value("max_decode_len", cfg.train.max_decode_len);
    }
    if (seed_override) cfg.seed = *seed_override;
    if (concurrency_override) cfg.concurrency = *concurrency_override;
    if (cache_dir_override) cfg.cache_dir = *cache_dir_override;
    cfg.config_digest = sha256_hex(raw + "\x1e" + std::to_string(cfg.seed));
    return cfg;
}

inline std::unique_ptr<FrameDecoder> make_decoder(const PipelineConfig& cfg) {
    if (cfg.decoder.kind == "synthetic") return std::make_unique<SyntheticDecoder>(cfg.seed);
    if (cfg.decoder.kind == "directory")
        return std::make_unique<DirectoryDecoder>(cfg.decoder.frames_root);
    if (cfg.decoder.kind == "exec")
        return std::make_unique<ExecDecoder>(cfg.decoder.command_template,
                                             std::filesystem::path(cfg.cache_dir) / "decode");
    throw std::invalid_argument("unknown decoder kind: " + cfg.decoder.kind);
}

inline std::unique_ptr<ChatProvider> make_provider(const PipelineConfig& cfg,
                                                   const ProviderConfig& provider) {
    if (provider.name == "mock")
        return std::make_unique<MockChatProvider>(cfg.seed, cfg.mock_defects);
    return std::make_unique<HttpChatProvider>(provider);
}

// ---- sample ----

struct SampleFailure {
    std::string clip_id;
    std::string detail;
};

struct SampleSummary {
    size_t clips = 0;
    size_t frames_written = 0;
    size_t skipped_clips = 0;
    std::vector<ScanIssue> manifest_issues;
    std::vector<SampleFailure> failures;

    bool ok() const { return manifest_issues.empty() && failures.empty(); }
};

inline bool frame_dir_complete(const std::filesystem::path& root, const std::string& clip_id,
                               size_t expected_count) {
    const auto dir = root / clip_id;
    if (!std::filesystem::exists(dir / "frames.json")) return false;
    try {
        std::ifstream in(dir / "frames.json", std::ios::binary);
        const auto meta = nlohmann::json::parse(in);
        if (meta.at("count").get<size_t>() != expected_count) return false;
        for (size_t k = 0; k < expected_count; ++k)
            if (!std::filesystem::exists(dir / frame_file_name(k))) return false;
        return true;
    } catch (...) {
        return false;
    }
}

inline SampleSummary cmd_sample(const PipelineConfig& cfg) {
    auto scan = scan_manifest(cfg.manifest_path);
    SampleSummary summary;
    summary.manifest_issues = scan.issues;
    summary.clips = scan.clips.size();
    const auto decoder = make_decoder(cfg);
    const std::string prov = cfg.provenance().dump();
    const std::filesystem::path frames_root(cfg.frames_dir);
    std::filesystem::create_directories(frames_root);

    std::mutex mu;
    std::vector<std::optional<SampleFailure>> failures(scan.clips.size());
    std::vector<size_t> written(scan.clips.size(), 0);
    std::vector<char> skipped(scan.clips.size(), 0);
    parallel_for(scan.clips.size(), cfg.concurrency, [&](size_t i) {
        const auto& clip = scan.clips[i];
        try {
            const long k_max = static_cast<long>(std::floor(clip.duration_s / cfg.interval_s));
            const size_t expected = static_cast<size_t>(k_max) + 1;
            if (frame_dir_complete(frames_root, clip.clip_id, expected)) {
                skipped[i] = 1;
                return;
            }
            const FrameSequence seq = sample_frames(clip, cfg.interval_s, *decoder);
            write_frame_dir(frames_root, seq, prov);
            written[i] = seq.frames.size();
        } catch (const std::exception& e) {
            failures[i] = SampleFailure{clip.clip_id, e.what()};
        }
    });
    for (size_t i = 0; i < scan.clips.size(); ++i) {
        if (failures[i]) summary.failures.push_back(*failures[i]);
        summary.frames_written += written[i];
        summary.skipped_clips += skipped[i];
    }
    return summary;
}

// ---- annotate ----

struct AnnotateSummary {
    size_t annotated = 0;
    size_t quarantined = 0;
    long scene_provider_calls = 0;
    long risk_provider_calls = 0;
    std::vector<QuarantineRecord> quarantine;

    bool ok() const { return quarantined == 0; }
};

inline nlohmann::ordered_json annotation_to_json(const UnifiedAnnotation& u,
                                                 const Provenance& prov) {
    nlohmann::ordered_json j;
    j["clip_id"] = u.clip_id;
    j["prompt_version"] = u.prompt_version;
    j["provenance"] = prov.to_json();
    j["scene"] = scene_to_json(u.scene);
    j["risk"] = risk_to_json(u.risk);
    j["unified_text"] = u.unified_text;
    j["template_text"] = u.template_text;
    return j;
}

inline UnifiedAnnotation annotation_from_json(const nlohmann::json& j) {
    UnifiedAnnotation u;
    u.clip_id = j.at("clip_id").get<std::string>();
    u.prompt_version = j.at("prompt_version").get<std::string>();
    u.scene = scene_from_json(j.at("scene"));
    u.risk = risk_from_json(j.at("risk"));
    u.unified_text = j.at("unified_text").get<std::string>();
    u.template_text = j.at("template_text").get<std::string>();
    return u;
}

inline AnnotateSummary cmd_annotate(const PipelineConfig& cfg) {
    auto scan = scan_manifest(cfg.manifest_path);
    const std::filesystem::path frames_root(cfg.frames_dir);
    const std::filesystem::path ann_root(cfg.annotations_dir);
    std::filesystem::create_directories(ann_root);

    const auto scene_provider = make_provider(cfg, cfg.scene_provider);
    const auto risk_provider = make_provider(cfg, cfg.risk_provider);
    ResponseCache cache{std::filesystem::path(cfg.cache_dir) / "responses"};
    CachingExecutor scene_exec(*scene_provider, cache, cfg.scene_provider);
    CachingExecutor risk_exec(*risk_provider, cache, cfg.risk_provider);

    std::vector<std::shared_ptr<const FrameSequence>> frames(scan.clips.size());
    std::vector<std::optional<QuarantineRecord>> load_failures(scan.clips.size());
    parallel_for(scan.clips.size(), cfg.concurrency, [&](size_t i) {
        try {
            frames[i] = std::make_shared<FrameSequence>(
                read_frame_sequence(frames_root, scan.clips[i].clip_id));
        } catch (const std::exception& e) {
            load_failures[i] =
                QuarantineRecord{scan.clips[i].clip_id, "ingest", "missing_frames", e.what()};
        }
    });

    std::vector<std::shared_ptr<const FrameSequence>> loaded;
    std::vector<QuarantineRecord> quarantine;
    for (size_t i = 0; i < frames.size(); ++i) {
        if (frames[i]) loaded.push_back(frames[i]);
        else quarantine.push_back(*load_failures[i]);
    }
    BatchResult batch = annotate_batch(loaded, scene_exec, risk_exec, cfg.concurrency);
    quarantine.insert(quarantine.end(), batch.quarantine.begin(), batch.quarantine.end());

    AnnotateSummary summary;
    const Provenance prov = cfg.provenance();
    for (const auto& item : batch.annotated) {
        const UnifiedAnnotation u = unify(item.clip_id, item.pair.scene, item.clip_id, item.pair.risk);
        std::ofstream out(ann_root / (u.clip_id + ".json"), std::ios::binary);
        out << annotation_to_json(u, prov).dump(2) << "\n";
        ++summary.annotated;
    }
    {
        std::ofstream q(ann_root / "quarantine.jsonl", std::ios::binary);
        for (const auto& rec : quarantine) {
            nlohmann::ordered_json j;
            j["clip_id"] = rec.clip_id;
            j["stage"] = rec.stage;
            j["error_kind"] = rec.error_kind;
            j["detail"] = rec.detail;
            q << j.dump() << "\n";
        }
    }
    summary.quarantined = quarantine.size();
    summary.quarantine = std::move(quarantine);
    summary.scene_provider_calls = scene_exec.provider_calls();
    summary.risk_provider_calls = risk_exec.provider_calls();
    {
        // Stable run artifact: provenance plus outcome counts. Provider call
        // counts stay in the console summary since they differ between cold and
        // cached runs.
        nlohmann::ordered_json run;
        run["provenance"] = prov.to_json();
        run["annotated"] = summary.annotated;
        run["quarantined"] = summary.quarantined;
        std::ofstream rf(ann_root / "run.json", std::ios::binary);
        rf << run.dump(2) << "\n";
    }
    return summary;
}

// ---- build-dataset ----

struct BuildDatasetSummary {
    size_t records = 0;
    std::vector<std::string> errors;

    bool ok() const { return errors.empty(); }
};

inline BuildDatasetSummary cmd_build_dataset(const PipelineConfig& cfg) {
    auto scan = scan_manifest(cfg.manifest_path);
    const std::filesystem::path frames_root(cfg.frames_dir);
    const std::filesystem::path ann_root(cfg.annotations_dir);
    BuildDatasetSummary summary;
    std::vector<SftRecord> records;
    for (const auto& clip : scan.clips) {
        const auto ann_path = ann_root / (clip.clip_id + ".json");
        if (!std::filesystem::exists(ann_path)) continue; // quarantined upstream
        try {
            std::ifstream in(ann_path, std::ios::binary);
            const UnifiedAnnotation u = annotation_from_json(nlohmann::json::parse(in));
            std::ifstream meta_in(frames_root / clip.clip_id / "frames.json", std::ios::binary);
            if (!meta_in) throw std::runtime_error("no frames.json for clip " + clip.clip_id);
            const auto meta = nlohmann::json::parse(meta_in);
            const size_t count = meta.at("count").get<size_t>();
            std::vector<std::string> paths;
            for (size_t k = 0; k < count; ++k)
                paths.push_back((frames_root / clip.clip_id / frame_file_name(k)).string());
            records.push_back(emit_sft_record(clip.clip_id, paths, u));
        } catch (const std::exception& e) {
            summary.errors.push_back(clip.clip_id + ": " + e.what());
        }
    }
    write_sft_dataset(cfg.dataset_path, records, cfg.provenance());
    summary.records = records.size();
    return summary;
}

// ---- toy-train ----

struct ToyTrainSummary {
    size_t items = 0;
    int vocab_size = 0;
    std::vector<double> trajectory;
    std::string checkpoint_path;

    double initial_loss() const { return trajectory.empty() ? 0.0 : trajectory.front(); }
    double final_loss() const { return trajectory.empty() ? 0.0 : trajectory.back(); }
};

inline ToyTrainSummary cmd_toy_train(const PipelineConfig& cfg) {
    const SftDataset ds = read_sft_dataset(cfg.dataset_path);
    if (ds.records.empty()) throw std::runtime_error("toy-train: dataset is empty");

    std::vector<std::string> targets;
    for (const auto& rec : ds.records) targets.push_back(rec.assistant_text);
    const Vocabulary vocab = Vocabulary::build(targets);

    std::vector<toy::TrainItem> items;
    std::vector<std::string> clip_ids;
    items.reserve(ds.records.size());
    for (const auto& rec : ds.records) {
        std::vector<Raster> rasters;
        rasters.reserve(rec.image_paths.size());
        for (const auto& p : rec.image_paths) rasters.push_back(read_png(p));
        const auto feature = toy::FrameFeature::from_rasters(rec.clip_id, rasters);
        TokenSequence seq = tokenize(rec.assistant_text, vocab);
        seq.ids.push_back(Vocabulary::kEosId);
        items.push_back(toy::TrainItem{feature.values, std::move(seq.ids)});
        clip_ids.push_back(rec.clip_id);
    }

    // Zero init keeps the first trajectory entry at exactly ln V; the model is
    // linear in its parameters, so no symmetry breaking is needed.
    toy::ToyModel model = toy::ToyModel::zeros(vocab.size());
    const toy::TrainResult result =
        toy::train_sft(model, items, cfg.train.epochs, cfg.train.learning_rate);

    const Provenance prov = cfg.provenance();
    toy::save_checkpoint(cfg.train.checkpoint_path, model, vocab.words(), prov.dump());
    {
        std::ofstream out(cfg.train.trajectory_path, std::ios::binary);
        out << "# provenance " << prov.dump() << "\n";
        out << "epoch\tmean_loss\n";
        char buf[64];
        for (size_t e = 0; e < result.trajectory.size(); ++e) {
            std::snprintf(buf, sizeof(buf), "%zu\t%.12g\n", e, result.trajectory[e]);
            out << buf;
        }
    }
    if (!cfg.train.decode_out.empty()) {
        std::map<std::string, std::string> decoded;
        for (size_t i = 0; i < items.size(); ++i) {
            TokenSequence seq;
            seq.ids = toy::greedy_decode(model, items[i].feature, cfg.train.max_decode_len);
            decoded[clip_ids[i]] = detokenize(seq, vocab);
        }
        eval::write_outputs(cfg.train.decode_out, decoded);
    }

    ToyTrainSummary summary;
    summary.items = items.size();
    summary.vocab_size = vocab.size();
    summary.trajectory = result.trajectory;
    summary.checkpoint_path = cfg.train.checkpoint_path;
    return summary;
}

// ---- evaluate ----

struct EvaluateSummary {
    metrics::MetricBundle bundle;
    size_t scored = 0;
    size_t quarantined = 0;
    std::string report_path;
};

inline EvaluateSummary cmd_evaluate(const PipelineConfig& cfg, const std::string& candidates_path,
                                    const std::string& references_path,
                                    const std::string& report_path, const std::string& model_tag) {
    const auto candidates = eval::load_outputs(candidates_path);
    const auto references = eval::load_outputs(references_path);
    const auto result = eval::score_run(candidates, references);

    eval::RunManifest manifest;
    manifest.run_tag = model_tag;
    manifest.candidate_source = candidates_path;
    manifest.reference_source = references_path;
    for (const auto& row : result.per_clip) manifest.clip_ids.push_back(row.clip_id);
    manifest.metric_config_digest = eval::metric_config_digest();

    const std::vector<eval::ReportRow> rows{{model_tag, result.bundle}};
    if (!report_path.empty()) {
        std::ofstream out(report_path, std::ios::binary);
        if (!out) throw std::runtime_error("cmd_evaluate: cannot write " + report_path);
        out << eval::render_report(rows);
        out << "\nscored clips: " << result.per_clip.size()
            << ", quarantined: " << result.quarantined.size() << "\n";
        out << "provenance: " << cfg.provenance().dump() << "\n";
        out << "\n" << eval::render_machine_report(rows);
        std::ofstream mf(report_path + ".manifest.json", std::ios::binary);
        mf << manifest.to_json().dump(2) << "\n";
        std::ofstream pc(report_path + ".per_clip.jsonl", std::ios::binary);
        for (const auto& row : result.per_clip) {
            nlohmann::ordered_json j;
            j["clip_id"] = row.clip_id;
            j["bleu4"] = row.bleu4;
            j["meteor"] = row.meteor;
            j["rouge_l"] = row.rouge_l;
            j["cider"] = row.cider;
            pc << j.dump() << "\n";
        }
    }
    EvaluateSummary summary;
    summary.bundle = result.bundle;
    summary.scored = result.per_clip.size();
    summary.quarantined = result.quarantined.size();
    summary.report_path = report_path;
    return summary;
}

// ---- verify ----

struct VerifySummary {
    std::vector<eval::RowCheck> checks;

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

inline VerifySummary cmd_verify() { return VerifySummary{eval::verify_published_rows()}; }

} // namespace vista
