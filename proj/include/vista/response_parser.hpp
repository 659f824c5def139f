#pragma once

#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vista/annotations.hpp"
#include "vista/prompts.hpp"
#include "vista/strings.hpp"

namespace vista {

struct ParseError : std::runtime_error {
    enum class Kind { missing_dimension, unrecognized_enum, bad_format };

    ParseError(Kind kind, std::string dimension, std::string detail)
        : std::runtime_error(describe(kind, dimension, detail)),
          kind(kind), dimension(std::move(dimension)), detail(std::move(detail)) {}

    static std::string describe(Kind k, const std::string& dim, const std::string& det) {
        switch (k) {
        case Kind::missing_dimension: return "missing dimension: " + dim;
        case Kind::unrecognized_enum: return "unrecognized value for " + dim + ": " + det;
        default: return "bad format in " + dim + ": " + det;
        }
    }

    Kind kind;
    std::string dimension;
    std::string detail;
};

namespace detail {

// Splits agent output into heading -> content. A line opens a section when, after
// optional list numbering and markdown bold marks, it starts with a known heading
// followed by ':'. Content spans until the next heading and is collapsed to one
// line.
template <size_t N>
std::map<std::string, std::string> split_sections(std::string_view raw,
                                                  const std::array<std::string_view, N>& headings,
                                                  std::string_view extra1 = {},
                                                  std::string_view extra2 = {}) {
    std::vector<std::string_view> known(headings.begin(), headings.end());
    if (!extra1.empty()) known.push_back(extra1);
    if (!extra2.empty()) known.push_back(extra2);

    std::map<std::string, std::string> sections;
    std::string current;
    std::string buffer;
    auto flush = [&] {
        if (!current.empty() && !sections.count(current)) sections[current] = collapse_ws(buffer);
        buffer.clear();
    };
    for (const auto& line : split_lines(raw)) {
        std::string_view body = line;
        size_t off = 0;
        while (off < body.size() &&
               (std::isspace(static_cast<unsigned char>(body[off])) ||
                std::isdigit(static_cast<unsigned char>(body[off])) || body[off] == '.' ||
                body[off] == ')' || body[off] == '-' || body[off] == '*'))
            ++off;
        body.remove_prefix(off);
        bool matched = false;
        for (const auto& h : known) {
            if (starts_with_icase(body, h)) {
                std::string_view rest = body.substr(h.size());
                size_t c = 0;
                while (c < rest.size() && (rest[c] == '*' || rest[c] == ' ')) ++c;
                if (c < rest.size() && rest[c] == ':') {
                    flush();
                    current = std::string(h);
                    buffer = std::string(rest.substr(c + 1));
                    matched = true;
                    break;
                }
            }
        }
        if (!matched && !current.empty()) {
            buffer += "\n";
            buffer += line;
        }
    }
    flush();
    return sections;
}

inline const std::string& require_section(const std::map<std::string, std::string>& sections,
                                          std::string_view heading) {
    auto it = sections.find(std::string(heading));
    if (it == sections.end() || it->second.empty())
        throw ParseError(ParseError::Kind::missing_dimension, std::string(heading), "");
    return it->second;
}

// First appearance of any flow-level word wins.
inline FlowLevel extract_flow_level(const std::string& text, const std::string& heading) {
    const std::string lower = to_lower(text);
    size_t best_pos = std::string::npos;
    FlowLevel best = FlowLevel::medium;
    for (size_t i = 0; i < vocab::kFlowLevel.size(); ++i) {
        const std::string word(vocab::kFlowLevel[i]);
        size_t pos = 0;
        while ((pos = lower.find(word, pos)) != std::string::npos) {
            const bool left_ok = pos == 0 || !std::isalpha(static_cast<unsigned char>(lower[pos - 1]));
            const size_t end = pos + word.size();
            const bool right_ok =
                end >= lower.size() || !std::isalpha(static_cast<unsigned char>(lower[end]));
            if (left_ok && right_ok) {
                if (pos < best_pos) {
                    best_pos = pos;
                    best = static_cast<FlowLevel>(i);
                }
                break;
            }
            pos = end;
        }
    }
    if (best_pos == std::string::npos)
        throw ParseError(ParseError::Kind::unrecognized_enum, heading,
                         "no speed level (high/medium/low) stated");
    return best;
}

} // namespace detail

inline SceneAnnotation parse_scene_response(const std::string& raw) {
    const auto sections = detail::split_sections(raw, prompts::kSceneHeadings, "Summary");
    SceneAnnotation s;
    s.raw_text = raw;

    auto parse_field = [&](std::string_view heading, auto parser, auto& out) {
        const std::string& value = detail::require_section(sections, heading);
        auto v = parser(value);
        if (!v)
            throw ParseError(ParseError::Kind::unrecognized_enum, std::string(heading), value);
        out = *v;
    };
    parse_field(prompts::kSceneHeadings[0], parse_time_of_day, s.time_of_day);
    parse_field(prompts::kSceneHeadings[1], parse_weather, s.weather);
    parse_field(prompts::kSceneHeadings[2], parse_pavement, s.pavement);
    s.vehicle_behavior = detail::require_section(sections, prompts::kSceneHeadings[3]);
    s.traffic_flow_speed = detail::require_section(sections, prompts::kSceneHeadings[4]);
    s.flow_level =
        detail::extract_flow_level(s.traffic_flow_speed, std::string(prompts::kSceneHeadings[4]));
    parse_field(prompts::kSceneHeadings[5], parse_congestion, s.congestion);
    s.summary = detail::require_section(sections, "Summary");
    return s;
}

inline std::pair<double, SpeedUnit> parse_safe_speed(const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double value = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || value <= 0.0)
        throw ParseError(ParseError::Kind::bad_format, "Suggested Safety Speed",
                         "expected '<number> <unit>', got '" + t + "'");
    auto unit = parse_speed_unit(strip_punct(trim(std::string(end))));
    if (!unit)
        throw ParseError(ParseError::Kind::unrecognized_enum, "Suggested Safety Speed",
                         "unit in '" + t + "'");
    return {value, *unit};
}

inline std::vector<std::string> parse_alerts(const std::string& text) {
    const std::string t = trim(text);
    if (to_lower(strip_punct(t)) == "none") return {};
    std::vector<std::string> alerts;
    size_t start = 0;
    while (start <= t.size()) {
        size_t semi = t.find(';', start);
        std::string item =
            trim(semi == std::string::npos ? t.substr(start) : t.substr(start, semi - start));
        if (!item.empty()) alerts.push_back(std::move(item));
        if (semi == std::string::npos) break;
        start = semi + 1;
    }
    return alerts;
}

inline RiskReport parse_risk_response(const std::string& raw) {
    const auto sections = detail::split_sections(raw, prompts::kRiskHeadings);
    RiskReport r;
    r.raw_text = raw;
    r.environmental_risk = detail::require_section(sections, prompts::kRiskHeadings[0]);
    r.behavior_risk = detail::require_section(sections, prompts::kRiskHeadings[1]);
    r.flow_risk = detail::require_section(sections, prompts::kRiskHeadings[2]);
    const std::string& level = detail::require_section(sections, prompts::kRiskHeadings[3]);
    auto parsed_level = parse_risk_level(level);
    if (!parsed_level)
        throw ParseError(ParseError::Kind::unrecognized_enum, std::string(prompts::kRiskHeadings[3]),
                         level);
    r.overall_level = *parsed_level;
    r.justification = detail::require_section(sections, prompts::kRiskHeadings[4]);
    auto alerts_it = sections.find(std::string(prompts::kRiskHeadings[5]));
    if (alerts_it == sections.end())
        throw ParseError(ParseError::Kind::missing_dimension, std::string(prompts::kRiskHeadings[5]),
                         "");
    r.alerts = parse_alerts(alerts_it->second);
    const std::string& speed = detail::require_section(sections, prompts::kRiskHeadings[6]);
    std::tie(r.safe_speed_value, r.safe_speed_unit) = parse_safe_speed(speed);
    return r;
}

} // namespace vista
