#pragma once

#include <cstdint>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "vista/agent_client.hpp"
#include "vista/annotations.hpp"
#include "vista/digest.hpp"
#include "vista/strings.hpp"

namespace vista {

// What a mock call should do wrong, for parser hardening and retry tests.
struct MockDefect {
    enum class Kind { missing_section, bad_enum, garbage, transient_failure };
    std::string clip_id;
    Stage stage = Stage::scene;
    Kind kind = Kind::missing_section;
    int remaining = 2; // transient_failure: how many attempts fail before success
};

inline MockDefect::Kind mock_defect_kind_from_string(const std::string& s) {
    if (s == "missing_section") return MockDefect::Kind::missing_section;
    if (s == "bad_enum") return MockDefect::Kind::bad_enum;
    if (s == "garbage") return MockDefect::Kind::garbage;
    if (s == "transient_failure") return MockDefect::Kind::transient_failure;
    throw std::invalid_argument("unknown mock defect kind: " + s);
}

// Schema-complete agent outputs from a generator keyed by (clip id, stage, seed).
// The risk stage reads the scene enums embedded in its own request, so the two
// stages stay coherent the way a real reasoning agent would be.
class MockChatProvider final : public ChatProvider {
public:
    explicit MockChatProvider(std::uint64_t seed, std::vector<MockDefect> defects = {})
        : seed_(seed), defects_(std::move(defects)) {}

    std::string complete(const AgentRequest& request) override {
        if (MockDefect* defect = match_defect(request)) {
            if (defect->kind == MockDefect::Kind::transient_failure) {
                std::scoped_lock lock(mu_);
                if (defect->remaining > 0) {
                    --defect->remaining;
                    throw TransientProviderError("mock: injected transient failure for clip " +
                                                 request.context_tag);
                }
            } else if (defect->kind == MockDefect::Kind::garbage) {
                return "The model declined to follow the requested structure entirely.";
            }
        }
        std::mt19937_64 rng(fnv1a64(request.context_tag + '\x1e' +
                                        std::string(to_string(request.stage)),
                                    seed_ ^ 0x5851f42d4c957f2dull));
        const MockDefect* defect = match_defect(request);
        const bool drop_section = defect && defect->kind == MockDefect::Kind::missing_section;
        const bool bad_enum = defect && defect->kind == MockDefect::Kind::bad_enum;
        return request.stage == Stage::scene ? scene_text(rng, drop_section, bad_enum)
                                             : risk_text(rng, request.user_text, drop_section,
                                                         bad_enum);
    }

private:
    template <size_t N>
    static std::string_view pick(std::mt19937_64& rng, const std::array<std::string_view, N>& options) {
        return options[rng() % N];
    }

    static std::string style_enum(std::mt19937_64& rng, std::string_view value) {
        std::string v(value);
        const unsigned style = rng() % 3;
        if (style == 1 && !v.empty()) v[0] = static_cast<char>(std::toupper(v[0]));
        if (style == 2) v += ".";
        return v;
    }

    MockDefect* match_defect(const AgentRequest& request) {
        for (auto& d : defects_)
            if (d.clip_id == request.context_tag && d.stage == request.stage) return &d;
        return nullptr;
    }

    std::string scene_text(std::mt19937_64& rng, bool drop_section, bool bad_enum) const {
        const auto time = pick(rng, vocab::kTimeOfDay);
        const auto weather = pick(rng, vocab::kWeather);
        std::string_view pavement;
        if (weather == "rainy") pavement = rng() % 3 ? "wet" : "flooded";
        else if (weather == "snowy") pavement = "snowy";
        else pavement = rng() % 4 ? "dry" : "wet";
        const auto congestion = pick(rng, vocab::kCongestion);
        const auto flow = pick(rng, vocab::kFlowLevel);

        static constexpr std::array<std::string_view, 4> behaviors{
            "Vehicles hold their lanes with occasional braking near the overpass",
            "Several cars change lanes smoothly while a truck keeps a steady pace",
            "Traffic brakes in short waves as vehicles merge from the on-ramp",
            "Most vehicles cruise steadily; one sedan accelerates past the camera"};
        static constexpr std::array<std::string_view, 3> flows{
            "Flow is mostly smooth with consistent spacing, moving at a %LEVEL% speed level",
            "Flow fluctuates slightly near the merge area at a generally %LEVEL% speed level",
            "Flow is steady with no stoppages, holding a %LEVEL% speed level"};

        const bool numbered = rng() % 2 == 0;
        auto heading = [&](int idx, std::string_view name) {
            return (numbered ? std::to_string(idx) + ". " : "") + std::string(name) + ": ";
        };
        std::string flow_text(pick(rng, flows));
        const std::string level_str(flow);
        if (auto pos = flow_text.find("%LEVEL%"); pos != std::string::npos)
            flow_text.replace(pos, 7, level_str);

        std::string out;
        out += heading(1, "Time of Day") + style_enum(rng, time) + "\n";
        out += heading(2, "Road Weather Conditions") +
               (bad_enum ? "hazy" : style_enum(rng, weather)) + "\n";
        out += heading(3, "Pavement Wetness Condition") + style_enum(rng, pavement) + "\n";
        out += heading(4, "Vehicle Behavior") + std::string(pick(rng, behaviors)) + ".\n";
        out += heading(5, "Traffic Flow and Speed") + flow_text + ".\n";
        if (!drop_section)
            out += heading(6, "Congestion Level") + style_enum(rng, congestion) + "\n";
        out += "Summary: A " + std::string(time) + " highway scene with " + std::string(weather) +
               " conditions, " + std::string(pavement) + " pavement, " + std::string(congestion) +
               " congestion, and " + std::string(flow) + "-speed traffic overall.\n";
        return out;
    }

    static std::string scrape_field(const std::string& text, const std::string& heading) {
        const auto pos = text.rfind("\n" + heading + ": ");
        if (pos == std::string::npos) return "";
        const auto start = pos + heading.size() + 3;
        auto end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        return trim(text.substr(start, end - start));
    }

    std::string risk_text(std::mt19937_64& rng, const std::string& request_text, bool drop_section,
                          bool bad_enum) const {
        // The request embeds the stage-1 render; condition the report on it.
        const auto weather = parse_weather(scrape_field(request_text, "Road Weather Conditions"))
                                 .value_or(Weather::clear);
        const auto pavement =
            parse_pavement(scrape_field(request_text, "Pavement Wetness Condition"))
                .value_or(Pavement::dry);
        const auto congestion = parse_congestion(scrape_field(request_text, "Congestion Level"))
                                    .value_or(Congestion::light);
        const auto time = parse_time_of_day(scrape_field(request_text, "Time of Day"))
                              .value_or(TimeOfDay::daytime);

        int hazard = 0;
        if (weather != Weather::clear) ++hazard;
        if (pavement != Pavement::dry) ++hazard;
        if (congestion == Congestion::heavy) ++hazard;
        if (time == TimeOfDay::nighttime) ++hazard;
        const RiskLevel level = hazard >= 3 ? RiskLevel::high
                                            : (hazard >= 1 ? RiskLevel::moderate : RiskLevel::low);

        const char* env_risk =
            weather == Weather::clear
                ? "Visibility is good and the surface gives no sign of reduced traction"
                : "Reduced visibility combines with a compromised surface to lengthen braking distances";
        const char* behavior_risk =
            hazard >= 2 ? "Braking waves suggest drivers are reacting to conditions ahead"
                        : "Maneuvers look routine with no clustering of evasive actions";
        const char* flow_risk = congestion == Congestion::heavy
                                    ? "Dense spacing raises the chance of chain rear-end collisions"
                                    : "Flow continuity is stable, keeping interaction risk contained";

        double speed = 65.0;
        if (weather != Weather::clear) speed -= 10.0;
        if (pavement == Pavement::flooded || pavement == Pavement::snowy) speed -= 15.0;
        else if (pavement == Pavement::wet) speed -= 5.0;
        if (congestion == Congestion::heavy) speed -= 10.0;
        if (time == TimeOfDay::nighttime) speed -= 5.0;

        std::vector<std::string> alerts;
        if (pavement != Pavement::dry) alerts.push_back("Reduce speed on compromised pavement");
        if (weather == Weather::foggy || time == TimeOfDay::nighttime)
            alerts.push_back("Use low beams and increase following distance");
        if (congestion == Congestion::heavy) alerts.push_back("Expect slowdowns; avoid sudden braking");

        std::string out;
        out += "Environmental Risk: " + std::string(env_risk) + ".\n";
        out += "Vehicle Behavior Risk: " + std::string(behavior_risk) + ".\n";
        out += "Traffic Flow Risk: " + std::string(flow_risk) + ".\n";
        out += "Overall Risk Level: " +
               (bad_enum ? std::string("severe") : style_enum(rng, to_string(level))) + "\n";
        out += "Justification: Conditions combine " + std::to_string(hazard) +
               " elevated factor(s), which sets the overall level.\n";
        if (!drop_section) out += "Alerts: " + render_alerts(alerts) + "\n";
        out += "Suggested Safety Speed: " + std::to_string(static_cast<int>(speed)) + " mph\n";
        return out;
    }

    std::uint64_t seed_;
    std::vector<MockDefect> defects_;
    std::mutex mu_;
};

} // namespace vista
