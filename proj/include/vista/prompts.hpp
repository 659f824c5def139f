#pragma once

#include <array>
#include <string>
#include <string_view>

namespace vista::prompts {

// Prompt texts are versioned constants; the version string is stamped into every
// annotation and dataset record built from them.
inline constexpr const char* kPromptVersion = "vista-prompts-v1";

inline constexpr std::array<std::string_view, 6> kSceneHeadings{
    "Time of Day",       "Road Weather Conditions", "Pavement Wetness Condition",
    "Vehicle Behavior",  "Traffic Flow and Speed",  "Congestion Level",
};

inline constexpr std::array<std::string_view, 7> kRiskHeadings{
    "Environmental Risk", "Vehicle Behavior Risk", "Traffic Flow Risk", "Overall Risk Level",
    "Justification",      "Alerts",                "Suggested Safety Speed",
};

inline constexpr const char* kSceneSystem =
    "You are a traffic scene analyst. You study consecutive frames taken from a highway "
    "camera and describe the scene precisely, reasoning step by step.";

inline std::string scene_user_prompt(size_t frame_count, double interval_s) {
    std::string out = "You are given " + std::to_string(frame_count) +
                      " frames sampled at " + std::to_string(interval_s).substr(0, 4) +
                      "-second intervals from a short traffic video clip.\n"
                      "Work through the frames step by step and report each of the following "
                      "dimensions on its own line, using the exact section headings shown:\n\n"
                      "1. Time of Day: daytime or nighttime, judged from ambient light and sky.\n"
                      "2. Road Weather Conditions: one of clear, foggy, rainy, snowy.\n"
                      "3. Pavement Wetness Condition: one of dry, wet, flooded, snowy.\n"
                      "4. Vehicle Behavior: lane changes, braking, acceleration, turns, or any "
                      "unusual or hazardous maneuvers.\n"
                      "5. Traffic Flow and Speed: describe how smooth the flow is and state the "
                      "general speed level (high, medium, or low).\n"
                      "6. Congestion Level: one of light, moderate, heavy.\n\n"
                      "Finish with a line headed 'Summary:' holding a single paragraph that "
                      "synthesizes the overall traffic conditions.";
    return out;
}

inline constexpr const char* kRiskSystem =
    "You are a traffic safety expert. You combine structured scene descriptions with video "
    "frames to produce careful, actionable risk assessments.";

inline std::string risk_user_prompt(const std::string& scene_render) {
    return std::string(
               "Below is a structured scene analysis of a short traffic video clip, together "
               "with the clip frames. Reason over both and produce a traffic risk report with "
               "the following sections, each on its own line with the exact headings shown:\n\n"
               "Environmental Risk: how visibility, weather, and pavement conditions interact.\n"
               "Vehicle Behavior Risk: whether observed maneuvers suggest latent hazards.\n"
               "Traffic Flow Risk: what flow stability implies about dynamic risk.\n"
               "Overall Risk Level: one of low, moderate, high.\n"
               "Justification: one sentence supporting the overall level.\n"
               "Alerts: a semicolon-separated list of driver warnings, or 'none'.\n"
               "Suggested Safety Speed: a number followed by mph or km/h.\n\n"
               "Scene analysis:\n") +
           scene_render;
}

// Training-time instruction for the student (system + user). The user text demands
// a two-part response mirroring the two agent stages.
inline constexpr const char* kTrainSystem =
    "You are an intelligent traffic safety assistant. You watch short clips from roadside "
    "cameras and produce structured reports for traffic operators.";

inline constexpr const char* kTrainUser =
    "Analyze the attached traffic video frames and provide a two-part response.\n"
    "Part 1 - Scene Analysis: report the time of day, road weather conditions, pavement "
    "wetness condition, vehicle behavior, traffic flow and speed, and congestion level, then "
    "summarize the scene.\n"
    "Part 2 - Traffic Risk Report: assess environmental risk, vehicle behavior risk, and "
    "traffic flow risk, state the overall risk level with a justification, and close with "
    "driver alerts and a suggested safety speed.";

// Section banners of the rewritten evaluation template.
inline constexpr const char* kTemplateSceneBanner = "[Scene Analysis]";
inline constexpr const char* kTemplateRiskBanner = "[Traffic Risk Report]";

// Machine-checkable grammar for rendered evaluation templates (ECMAScript regex,
// matched against the whole text).
inline constexpr const char* kTemplateGrammar =
    R"(\[Scene Analysis\])"
    "\n"
    R"(Time of Day: (daytime|nighttime))"
    "\n"
    R"(Road Weather Conditions: (clear|foggy|rainy|snowy))"
    "\n"
    R"(Pavement Wetness Condition: (dry|wet|flooded|snowy))"
    "\n"
    R"(Vehicle Behavior: [^\n]+)"
    "\n"
    R"(Traffic Flow and Speed: [^\n]+ \(speed level: (high|medium|low)\))"
    "\n"
    R"(Congestion Level: (light|moderate|heavy))"
    "\n"
    R"(Summary: [^\n]+)"
    "\n\n"
    R"(\[Traffic Risk Report\])"
    "\n"
    R"(Environmental Risk: [^\n]+)"
    "\n"
    R"(Vehicle Behavior Risk: [^\n]+)"
    "\n"
    R"(Traffic Flow Risk: [^\n]+)"
    "\n"
    R"(Overall Risk Level: (low|moderate|high))"
    "\n"
    R"(Justification: [^\n]+)"
    "\n"
    R"(Alerts: [^\n]+)"
    "\n"
    R"(Suggested Safety Speed: \d+(\.\d+)? (mph|km/h))";

// Fixed delimiter between the scene and risk renders inside a unified annotation.
// Field values are single-line, so the delimiter line cannot occur inside either
// render and the concatenation stays reversible.
inline constexpr const char* kUnifiedSeparator = "\n\n---\n\n";

} // namespace vista::prompts
