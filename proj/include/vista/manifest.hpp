#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace vista {

struct VideoClip {
    std::string clip_id;
    std::string source_path;
    double duration_s = 0.0;
    std::string region_tag;
    std::optional<std::string> captured_at;
};

inline constexpr double kMinClipDuration = 1.0;
inline constexpr double kMaxClipDuration = 60.0;

struct ScanIssue {
    int row = 0; // 1-based line number
    std::string clip_id;
    std::string reason;
};

struct ScanResult {
    std::vector<VideoClip> clips; // valid clips, manifest order
    std::vector<ScanIssue> issues;

    bool ok() const { return issues.empty(); }
};

// Manifest: one JSON record per line with fields clip_id, source_path, duration_s,
// region_tag and optional captured_at. Bad rows are reported with their line
// number; valid rows are still returned so a batch can keep going.
inline ScanResult scan_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw std::runtime_error("scan_manifest: cannot open " + manifest_path);
    ScanResult result;
    std::set<std::string> seen;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            result.issues.push_back({row, "", std::string("invalid JSON: ") + e.what()});
            continue;
        }
        VideoClip clip;
        try {
            clip.clip_id = rec.at("clip_id").get<std::string>();
            clip.source_path = rec.at("source_path").get<std::string>();
            clip.duration_s = rec.at("duration_s").get<double>();
            clip.region_tag = rec.at("region_tag").get<std::string>();
            if (rec.contains("captured_at") && !rec["captured_at"].is_null())
                clip.captured_at = rec["captured_at"].get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            result.issues.push_back({row, "", std::string("missing/bad field: ") + e.what()});
            continue;
        }
        if (clip.clip_id.empty()) {
            result.issues.push_back({row, "", "empty clip_id"});
            continue;
        }
        if (!seen.insert(clip.clip_id).second) {
            result.issues.push_back({row, clip.clip_id, "duplicate clip_id"});
            continue;
        }
        if (!(clip.duration_s >= kMinClipDuration && clip.duration_s <= kMaxClipDuration)) {
            result.issues.push_back(
                {row, clip.clip_id,
                 "duration " + std::to_string(clip.duration_s) + " s outside [1, 60] s band"});
            continue;
        }
        result.clips.push_back(std::move(clip));
    }
    return result;
}

} // namespace vista
