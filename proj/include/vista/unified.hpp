#pragma once

#include <regex>
#include <stdexcept>
#include <string>

#include "vista/annotations.hpp"
#include "vista/prompts.hpp"

namespace vista {

// Concatenated pseudo-label: the scene render strictly precedes the risk render,
// joined by the fixed separator so audits can split it back apart.
struct UnifiedAnnotation {
    std::string clip_id;
    SceneAnnotation scene;
    RiskReport risk;
    std::string unified_text;
    std::string template_text;
    std::string prompt_version = prompts::kPromptVersion;
};

inline std::string render_unified_text(const SceneAnnotation& scene, const RiskReport& risk) {
    return render_scene(scene) + prompts::kUnifiedSeparator + render_risk(risk);
}

inline std::string render_template_text(const SceneAnnotation& scene, const RiskReport& risk) {
    return std::string(prompts::kTemplateSceneBanner) + "\n" + render_scene(scene) + "\n\n" +
           prompts::kTemplateRiskBanner + "\n" + render_risk(risk);
}

inline UnifiedAnnotation unify(const std::string& scene_clip_id, const SceneAnnotation& scene,
                               const std::string& risk_clip_id, const RiskReport& risk) {
    if (scene_clip_id != risk_clip_id)
        throw std::invalid_argument("unify: clip_id mismatch: '" + scene_clip_id + "' vs '" +
                                    risk_clip_id + "'");
    UnifiedAnnotation u;
    u.clip_id = scene_clip_id;
    u.scene = scene;
    u.risk = risk;
    u.unified_text = render_unified_text(scene, risk);
    u.template_text = render_template_text(scene, risk);
    return u;
}

// Fixed-order, fixed-heading rendering used for metric-time comparison. Pure in the
// annotation, so re-rendering never changes the text.
inline std::string render_template(const UnifiedAnnotation& unified) {
    return render_template_text(unified.scene, unified.risk);
}

struct UnifiedSplit {
    std::string scene_render;
    std::string risk_render;
};

inline UnifiedSplit split_unified(const std::string& unified_text) {
    const std::string sep = prompts::kUnifiedSeparator;
    const auto pos = unified_text.find(sep);
    if (pos == std::string::npos)
        throw std::runtime_error("split_unified: separator not found");
    return {unified_text.substr(0, pos), unified_text.substr(pos + sep.size())};
}

inline bool template_matches_grammar(const std::string& template_text) {
    static const std::regex grammar(prompts::kTemplateGrammar);
    return std::regex_match(template_text, grammar);
}

} // namespace vista
