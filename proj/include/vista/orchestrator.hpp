#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vista/agent_client.hpp"
#include "vista/annotations.hpp"
#include "vista/concurrency.hpp"
#include "vista/response_parser.hpp"

namespace vista {

struct StageError : std::runtime_error {
    StageError(Stage stage, std::string error_kind, const std::string& detail)
        : std::runtime_error("stage " + std::string(to_string(stage)) + " failed (" + error_kind +
                             "): " + detail),
          stage(stage), error_kind(std::move(error_kind)), detail(detail) {}
    Stage stage;
    std::string error_kind;
    std::string detail;
};

struct QuarantineRecord {
    std::string clip_id;
    std::string stage;
    std::string error_kind;
    std::string detail;
};

struct TwoStagePair {
    SceneAnnotation scene;
    RiskReport risk;
};

namespace detail {

inline std::string parse_error_kind(const ParseError& e) {
    switch (e.kind) {
    case ParseError::Kind::missing_dimension: return "missing_dimension";
    case ParseError::Kind::unrecognized_enum: return "unrecognized_enum";
    default: return "bad_format";
    }
}

template <typename Fn>
auto run_stage(Stage stage, Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        throw StageError(stage, parse_error_kind(e), e.what());
    } catch (const RetriesExhaustedError& e) {
        throw StageError(stage, "retries_exhausted", e.what());
    } catch (const AuthenticationError& e) {
        throw StageError(stage, "auth", e.what());
    } catch (const MalformedResponseError& e) {
        throw StageError(stage, "malformed_response", e.what());
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, "error", e.what());
    }
}

} // namespace detail

// Two sequential agent calls per clip: the risk request embeds the parsed scene
// exactly as stage 1 produced it. A stage-1 failure means stage 2 is never issued.
inline TwoStagePair run_two_stage(std::shared_ptr<const FrameSequence> frames,
                                  CachingExecutor& scene_executor,
                                  CachingExecutor& risk_executor) {
    TwoStagePair out;
    out.scene = detail::run_stage(Stage::scene, [&] {
        const AgentRequest req = build_scene_prompt(frames);
        return parse_scene_response(scene_executor.fetch(req));
    });
    out.risk = detail::run_stage(Stage::risk, [&] {
        const AgentRequest req = build_risk_prompt(frames, out.scene);
        return parse_risk_response(risk_executor.fetch(req));
    });
    return out;
}

struct AnnotatedClip {
    std::string clip_id;
    TwoStagePair pair;
};

struct BatchResult {
    std::vector<AnnotatedClip> annotated; // input order, failures removed
    std::vector<QuarantineRecord> quarantine;
};

// Clips run concurrently under the in-flight cap; each failure is quarantined with
// stage attribution and the batch keeps going.
inline BatchResult annotate_batch(const std::vector<std::shared_ptr<const FrameSequence>>& clips,
                                  CachingExecutor& scene_executor, CachingExecutor& risk_executor,
                                  size_t concurrency) {
    std::vector<std::optional<AnnotatedClip>> slots(clips.size());
    std::vector<std::optional<QuarantineRecord>> failures(clips.size());
    parallel_for(clips.size(), concurrency, [&](size_t i) {
        const std::string clip_id = clips[i] ? clips[i]->clip_id : "<null>";
        try {
            slots[i] = AnnotatedClip{clip_id, run_two_stage(clips[i], scene_executor, risk_executor)};
        } catch (const StageError& e) {
            failures[i] =
                QuarantineRecord{clip_id, std::string(to_string(e.stage)), e.error_kind, e.detail};
        } catch (const std::exception& e) {
            failures[i] = QuarantineRecord{clip_id, "scene", "error", e.what()};
        }
    });
    BatchResult result;
    for (size_t i = 0; i < clips.size(); ++i) {
        if (slots[i]) result.annotated.push_back(std::move(*slots[i]));
        if (failures[i]) result.quarantine.push_back(std::move(*failures[i]));
    }
    return result;
}

} // namespace vista
