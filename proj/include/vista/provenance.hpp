#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "vista/prompts.hpp"
#include "vista/version.hpp"

namespace vista {

// Stamped into every artifact a run produces.
struct Provenance {
    std::string tool_version = kToolVersion;
    std::string prompt_version = prompts::kPromptVersion;
    std::uint64_t seed = 0;
    std::string config_digest;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["tool_version"] = tool_version;
        j["prompt_version"] = prompt_version;
        j["seed"] = seed;
        j["config_digest"] = config_digest;
        return j;
    }

    std::string dump() const { return to_json().dump(); }
};

} // namespace vista
