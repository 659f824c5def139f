#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vista/provenance.hpp"
#include "vista/prompts.hpp"
#include "vista/unified.hpp"

namespace vista {

// One training conversation: system/user instruction plus the unified pseudo-label
// as the assistant target.
struct SftRecord {
    std::string clip_id;
    std::vector<std::string> image_paths;
    std::string system_text;
    std::string user_text;
    std::string assistant_text;
};

inline SftRecord emit_sft_record(const std::string& clip_id,
                                 const std::vector<std::string>& image_paths,
                                 const UnifiedAnnotation& unified) {
    if (clip_id != unified.clip_id)
        throw std::invalid_argument("emit_sft_record: clip_id mismatch");
    for (const auto& p : image_paths)
        if (!std::filesystem::exists(p))
            throw std::runtime_error("emit_sft_record: missing frame file " + p +
                                     " for clip " + clip_id);
    SftRecord rec;
    rec.clip_id = clip_id;
    rec.image_paths = image_paths;
    rec.system_text = prompts::kTrainSystem;
    rec.user_text = prompts::kTrainUser;
    rec.assistant_text = unified.unified_text;
    return rec;
}

inline nlohmann::ordered_json sft_record_to_json(const SftRecord& rec,
                                                 const Provenance& provenance) {
    nlohmann::ordered_json j;
    j["id"] = rec.clip_id;
    j["images"] = rec.image_paths;
    j["messages"] = nlohmann::ordered_json::array(
        {{{"role", "system"}, {"content", rec.system_text}},
         {{"role", "user"}, {"content", rec.user_text}},
         {{"role", "assistant"}, {"content", rec.assistant_text}}});
    j["provenance"] = provenance.to_json();
    return j;
}

// Schema gate for one dataset line. Throws with a field-level reason.
inline void validate_sft_json(const nlohmann::json& j) {
    if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty())
        throw std::runtime_error("sft record: missing or empty 'id'");
    if (!j.contains("images") || !j["images"].is_array())
        throw std::runtime_error("sft record: 'images' must be an array");
    for (const auto& img : j["images"])
        if (!img.is_string()) throw std::runtime_error("sft record: non-string image path");
    if (!j.contains("messages") || !j["messages"].is_array() || j["messages"].size() != 3)
        throw std::runtime_error("sft record: 'messages' must hold system/user/assistant");
    static const char* roles[3] = {"system", "user", "assistant"};
    for (size_t i = 0; i < 3; ++i) {
        const auto& m = j["messages"][i];
        if (!m.contains("role") || m["role"] != roles[i])
            throw std::runtime_error(std::string("sft record: message ") + std::to_string(i) +
                                     " must have role '" + roles[i] + "'");
        if (!m.contains("content") || !m["content"].is_string() ||
            m["content"].get<std::string>().empty())
            throw std::runtime_error("sft record: empty content in message " + std::to_string(i));
    }
    const std::string user = j["messages"][1]["content"].get<std::string>();
    if (user.find("a two-part response") == std::string::npos)
        throw std::runtime_error("sft record: user instruction must demand a two-part response");
}

inline void write_sft_dataset(const std::string& path, const std::vector<SftRecord>& records,
                              const Provenance& provenance) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_sft_dataset: cannot write " + path);
    for (const auto& rec : records) {
        const auto j = sft_record_to_json(rec, provenance);
        validate_sft_json(j);
        out << j.dump() << "\n";
    }
}

struct SftDataset {
    std::vector<SftRecord> records;
    Provenance provenance;
};

inline SftDataset read_sft_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_sft_dataset: cannot read " + path);
    SftDataset ds;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            validate_sft_json(j);
        } catch (const std::exception& e) {
            throw std::runtime_error("read_sft_dataset: line " + std::to_string(row) + ": " +
                                     e.what());
        }
        SftRecord rec;
        rec.clip_id = j["id"].get<std::string>();
        rec.image_paths = j["images"].get<std::vector<std::string>>();
        rec.system_text = j["messages"][0]["content"].get<std::string>();
        rec.user_text = j["messages"][1]["content"].get<std::string>();
        rec.assistant_text = j["messages"][2]["content"].get<std::string>();
        ds.records.push_back(std::move(rec));
        if (row == 1 && j.contains("provenance")) {
            const auto& p = j["provenance"];
            ds.provenance.tool_version = p.value("tool_version", "");
            ds.provenance.prompt_version = p.value("prompt_version", "");
            ds.provenance.seed = p.value("seed", 0ull);
            ds.provenance.config_digest = p.value("config_digest", "");
        }
    }
    return ds;
}

} // namespace vista
