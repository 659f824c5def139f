#pragma once

#include <array>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vista/strings.hpp"

namespace vista {

enum class TimeOfDay { daytime, nighttime };
enum class Weather { clear, foggy, rainy, snowy };
enum class Pavement { dry, wet, flooded, snowy };
enum class FlowLevel { high, medium, low };
enum class Congestion { light, moderate, heavy };
enum class RiskLevel { low, moderate, high };
enum class SpeedUnit { mph, kmh };

namespace vocab {

inline constexpr std::array<std::string_view, 2> kTimeOfDay{"daytime", "nighttime"};
inline constexpr std::array<std::string_view, 4> kWeather{"clear", "foggy", "rainy", "snowy"};
inline constexpr std::array<std::string_view, 4> kPavement{"dry", "wet", "flooded", "snowy"};
inline constexpr std::array<std::string_view, 3> kFlowLevel{"high", "medium", "low"};
inline constexpr std::array<std::string_view, 3> kCongestion{"light", "moderate", "heavy"};
inline constexpr std::array<std::string_view, 3> kRiskLevel{"low", "moderate", "high"};

} // namespace vocab

namespace detail {

template <typename Enum, size_t N>
std::optional<Enum> parse_enum(std::string_view raw, const std::array<std::string_view, N>& names) {
    const std::string norm = to_lower(strip_punct(trim(raw)));
    for (size_t i = 0; i < N; ++i)
        if (norm == names[i]) return static_cast<Enum>(i);
    return std::nullopt;
}

template <typename Enum, size_t N>
std::string_view enum_name(Enum value, const std::array<std::string_view, N>& names) {
    return names[static_cast<size_t>(value)];
}

} // namespace detail

inline std::string_view to_string(TimeOfDay v) { return detail::enum_name(v, vocab::kTimeOfDay); }
inline std::string_view to_string(Weather v) { return detail::enum_name(v, vocab::kWeather); }
inline std::string_view to_string(Pavement v) { return detail::enum_name(v, vocab::kPavement); }
inline std::string_view to_string(FlowLevel v) { return detail::enum_name(v, vocab::kFlowLevel); }
inline std::string_view to_string(Congestion v) { return detail::enum_name(v, vocab::kCongestion); }
inline std::string_view to_string(RiskLevel v) { return detail::enum_name(v, vocab::kRiskLevel); }
inline std::string_view to_string(SpeedUnit v) { return v == SpeedUnit::mph ? "mph" : "km/h"; }

inline std::optional<TimeOfDay> parse_time_of_day(std::string_view s) {
    return detail::parse_enum<TimeOfDay>(s, vocab::kTimeOfDay);
}
inline std::optional<Weather> parse_weather(std::string_view s) {
    return detail::parse_enum<Weather>(s, vocab::kWeather);
}
inline std::optional<Pavement> parse_pavement(std::string_view s) {
    return detail::parse_enum<Pavement>(s, vocab::kPavement);
}
inline std::optional<FlowLevel> parse_flow_level(std::string_view s) {
    return detail::parse_enum<FlowLevel>(s, vocab::kFlowLevel);
}
inline std::optional<Congestion> parse_congestion(std::string_view s) {
    return detail::parse_enum<Congestion>(s, vocab::kCongestion);
}
inline std::optional<RiskLevel> parse_risk_level(std::string_view s) {
    return detail::parse_enum<RiskLevel>(s, vocab::kRiskLevel);
}
inline std::optional<SpeedUnit> parse_speed_unit(std::string_view s) {
    const std::string norm = to_lower(trim(s));
    if (norm == "mph") return SpeedUnit::mph;
    if (norm == "km/h" || norm == "kmh" || norm == "kph") return SpeedUnit::kmh;
    return std::nullopt;
}

// Agent 1 output: six scene dimensions plus a synthesized summary. Field values are
// whitespace-collapsed single lines; raw_text keeps the verbatim agent output.
struct SceneAnnotation {
    TimeOfDay time_of_day = TimeOfDay::daytime;
    Weather weather = Weather::clear;
    Pavement pavement = Pavement::dry;
    std::string vehicle_behavior;
    std::string traffic_flow_speed;
    FlowLevel flow_level = FlowLevel::medium;
    Congestion congestion = Congestion::light;
    std::string summary;
    std::string raw_text;

    bool complete() const {
        return !vehicle_behavior.empty() && !traffic_flow_speed.empty() && !summary.empty();
    }
};

// Agent 2 output: four risk dimensions, alerts, suggested safe speed.
struct RiskReport {
    std::string environmental_risk;
    std::string behavior_risk;
    std::string flow_risk;
    RiskLevel overall_level = RiskLevel::low;
    std::string justification;
    std::vector<std::string> alerts; // may be empty, never "absent"
    double safe_speed_value = 0.0;
    SpeedUnit safe_speed_unit = SpeedUnit::mph;
    std::string raw_text;

    bool complete() const {
        return !environmental_risk.empty() && !behavior_risk.empty() && !flow_risk.empty() &&
               !justification.empty() && safe_speed_value > 0.0;
    }
};

inline std::string format_speed(double value, SpeedUnit unit) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%g %s", value, std::string(to_string(unit)).c_str());
    return buf;
}

inline std::string render_alerts(const std::vector<std::string>& alerts) {
    if (alerts.empty()) return "none";
    std::string out;
    for (size_t i = 0; i < alerts.size(); ++i) {
        if (i) out += "; ";
        out += alerts[i];
    }
    return out;
}

// Canonical renderings. These are what gets concatenated into the unified
// pseudo-label and embedded into the stage-2 prompt; one field per line, values
// single-line by construction.
inline std::string render_scene(const SceneAnnotation& s) {
    std::string out;
    out += "Time of Day: " + std::string(to_string(s.time_of_day)) + "\n";
    out += "Road Weather Conditions: " + std::string(to_string(s.weather)) + "\n";
    out += "Pavement Wetness Condition: " + std::string(to_string(s.pavement)) + "\n";
    out += "Vehicle Behavior: " + s.vehicle_behavior + "\n";
    out += "Traffic Flow and Speed: " + s.traffic_flow_speed + " (speed level: " +
           std::string(to_string(s.flow_level)) + ")\n";
    out += "Congestion Level: " + std::string(to_string(s.congestion)) + "\n";
    out += "Summary: " + s.summary;
    return out;
}

inline std::string render_risk(const RiskReport& r) {
    std::string out;
    out += "Environmental Risk: " + r.environmental_risk + "\n";
    out += "Vehicle Behavior Risk: " + r.behavior_risk + "\n";
    out += "Traffic Flow Risk: " + r.flow_risk + "\n";
    out += "Overall Risk Level: " + std::string(to_string(r.overall_level)) + "\n";
    out += "Justification: " + r.justification + "\n";
    out += "Alerts: " + render_alerts(r.alerts) + "\n";
    out += "Suggested Safety Speed: " + format_speed(r.safe_speed_value, r.safe_speed_unit);
    return out;
}

inline nlohmann::ordered_json scene_to_json(const SceneAnnotation& s) {
    nlohmann::ordered_json j;
    j["time_of_day"] = to_string(s.time_of_day);
    j["weather"] = to_string(s.weather);
    j["pavement"] = to_string(s.pavement);
    j["vehicle_behavior"] = s.vehicle_behavior;
    j["traffic_flow_speed"] = s.traffic_flow_speed;
    j["flow_level"] = to_string(s.flow_level);
    j["congestion"] = to_string(s.congestion);
    j["summary"] = s.summary;
    j["raw_text"] = s.raw_text;
    return j;
}

inline nlohmann::ordered_json risk_to_json(const RiskReport& r) {
    nlohmann::ordered_json j;
    j["environmental_risk"] = r.environmental_risk;
    j["behavior_risk"] = r.behavior_risk;
    j["flow_risk"] = r.flow_risk;
    j["overall_level"] = to_string(r.overall_level);
    j["justification"] = r.justification;
    j["alerts"] = r.alerts;
    j["safe_speed_value"] = r.safe_speed_value;
    j["safe_speed_unit"] = to_string(r.safe_speed_unit);
    j["raw_text"] = r.raw_text;
    return j;
}

inline SceneAnnotation scene_from_json(const nlohmann::json& j) {
    SceneAnnotation s;
    auto req = [&](const char* field, auto parser, auto& out) {
        auto v = parser(j.at(field).get<std::string>());
        if (!v) throw std::runtime_error(std::string("scene_from_json: bad ") + field);
        out = *v;
    };
    req("time_of_day", parse_time_of_day, s.time_of_day);
    req("weather", parse_weather, s.weather);
    req("pavement", parse_pavement, s.pavement);
    s.vehicle_behavior = j.at("vehicle_behavior").get<std::string>();
    s.traffic_flow_speed = j.at("traffic_flow_speed").get<std::string>();
    req("flow_level", parse_flow_level, s.flow_level);
    req("congestion", parse_congestion, s.congestion);
    s.summary = j.at("summary").get<std::string>();
    s.raw_text = j.value("raw_text", "");
    return s;
}

inline RiskReport risk_from_json(const nlohmann::json& j) {
    RiskReport r;
    r.environmental_risk = j.at("environmental_risk").get<std::string>();
    r.behavior_risk = j.at("behavior_risk").get<std::string>();
    r.flow_risk = j.at("flow_risk").get<std::string>();
    auto level = parse_risk_level(j.at("overall_level").get<std::string>());
    if (!level) throw std::runtime_error("risk_from_json: bad overall_level");
    r.overall_level = *level;
    r.justification = j.at("justification").get<std::string>();
    r.alerts = j.at("alerts").get<std::vector<std::string>>();
    r.safe_speed_value = j.at("safe_speed_value").get<double>();
    auto unit = parse_speed_unit(j.at("safe_speed_unit").get<std::string>());
    if (!unit) throw std::runtime_error("risk_from_json: bad safe_speed_unit");
    r.safe_speed_unit = *unit;
    r.raw_text = j.value("raw_text", "");
    return r;
}

} // namespace vista
