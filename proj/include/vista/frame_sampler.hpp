#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "vista/digest.hpp"
#include "vista/manifest.hpp"
#include "vista/png_io.hpp"
#include "vista/raster.hpp"

namespace vista {

struct FrameSequence {
    std::string clip_id;
    double interval_s = 0.5;
    std::vector<Raster> frames;     // each exactly 224x224
    std::vector<double> frame_times; // k * interval_s

    size_t count() const { return frames.size(); }
};

// Decodes one frame of a clip at a timestamp. Implementations must be safe to call
// from multiple workers.
class FrameDecoder {
public:
    virtual ~FrameDecoder() = default;
    virtual Raster decode(const VideoClip& clip, double t_seconds) const = 0;
};

struct DecodeError : std::runtime_error {
    DecodeError(const std::string& clip_id, double t, const std::string& detail)
        : std::runtime_error("decode failure: clip " + clip_id + " at t=" + std::to_string(t) +
                             "s: " + detail),
          clip_id(clip_id), t_seconds(t) {}
    std::string clip_id;
    double t_seconds;
};

// Procedural frames keyed by (seed, clip_id, timestamp). Emits a non-square native
// size so the crop-and-scale path is always exercised.
class SyntheticDecoder final : public FrameDecoder {
public:
    explicit SyntheticDecoder(std::uint64_t seed, int native_w = 640, int native_h = 360)
        : seed_(seed), w_(native_w), h_(native_h) {}

    Raster decode(const VideoClip& clip, double t_seconds) const override {
        const std::uint64_t clip_seed = fnv1a64(clip.clip_id, seed_ ^ 0xa5a5a5a5a5a5a5a5ull);
        const int tick = static_cast<int>(std::lround(t_seconds * 1000.0));
        return synthetic_raster(clip_seed, tick, w_, h_);
    }

private:
    std::uint64_t seed_;
    int w_, h_;
};

// Reads pre-extracted frames from <root>/<clip_id>/frame_0000.png ..., treated as
// uniformly spaced over [0, duration]; decode picks the nearest one.
class DirectoryDecoder final : public FrameDecoder {
public:
    explicit DirectoryDecoder(std::filesystem::path root) : root_(std::move(root)) {}

    Raster decode(const VideoClip& clip, double t_seconds) const override {
        const auto files = listing(clip);
        if (files.empty()) throw DecodeError(clip.clip_id, t_seconds, "no frame_*.png files");
        size_t idx = 0;
        if (files.size() > 1 && clip.duration_s > 0) {
            const double pos = t_seconds * static_cast<double>(files.size() - 1) / clip.duration_s;
            idx = static_cast<size_t>(std::lround(std::clamp(
                pos, 0.0, static_cast<double>(files.size() - 1))));
        }
        try {
            return read_png(files[idx]);
        } catch (const std::exception& e) {
            throw DecodeError(clip.clip_id, t_seconds, e.what());
        }
    }

private:
    std::vector<std::string> listing(const VideoClip& clip) const {
        std::scoped_lock lock(mu_);
        auto it = cache_.find(clip.clip_id);
        if (it != cache_.end()) return it->second;
        const auto dir = root_ / clip.clip_id;
        std::vector<std::string> files;
        if (std::filesystem::is_directory(dir)) {
            for (const auto& entry : std::filesystem::directory_iterator(dir)) {
                const auto name = entry.path().filename().string();
                if (name.rfind("frame_", 0) == 0 && entry.path().extension() == ".png")
                    files.push_back(entry.path().string());
            }
            std::sort(files.begin(), files.end());
        }
        cache_[clip.clip_id] = files;
        return files;
    }

    std::filesystem::path root_;
    mutable std::mutex mu_;
    mutable std::map<std::string, std::vector<std::string>> cache_;
};

// Shells out to an external media decoder. The command template names {input},
// {time} and {output}; the tool must write a PNG to {output}.
class ExecDecoder final : public FrameDecoder {
public:
    ExecDecoder(std::string command_template, std::filesystem::path scratch_dir)
        : template_(std::move(command_template)), scratch_(std::move(scratch_dir)) {}

    Raster decode(const VideoClip& clip, double t_seconds) const override {
        std::filesystem::create_directories(scratch_);
        char tbuf[32];
        std::snprintf(tbuf, sizeof(tbuf), "%.3f", t_seconds);
        const auto out_path =
            (scratch_ / (clip.clip_id + "_" + sha256_hex(clip.clip_id + tbuf).substr(0, 12) + ".png"))
                .string();
        std::string cmd = template_;
        replace_all(cmd, "{input}", clip.source_path);
        replace_all(cmd, "{time}", tbuf);
        replace_all(cmd, "{output}", out_path);
        const int rc = std::system(cmd.c_str());
        if (rc != 0) throw DecodeError(clip.clip_id, t_seconds, "decoder exited with status " +
                                                                    std::to_string(rc));
        if (!std::filesystem::exists(out_path))
            throw DecodeError(clip.clip_id, t_seconds, "decoder produced no output");
        Raster img = read_png(out_path);
        std::filesystem::remove(out_path);
        return img;
    }

private:
    static void replace_all(std::string& s, const std::string& from, const std::string& to) {
        size_t pos = 0;
        while ((pos = s.find(from, pos)) != std::string::npos) {
            s.replace(pos, from.size(), to);
            pos += to.size();
        }
    }

    std::string template_;
    std::filesystem::path scratch_;
};

// Samples the closed grid t = k * interval for k = 0 .. floor(duration / interval)
// and normalizes every frame to 224x224.
inline FrameSequence sample_frames(const VideoClip& clip, double interval_s,
                                   const FrameDecoder& decoder) {
    if (interval_s <= 0.0) throw std::invalid_argument("sample_frames: interval must be > 0");
    const long k_max = static_cast<long>(std::floor(clip.duration_s / interval_s));
    if (k_max < 1)
        throw std::runtime_error("sample_frames: clip " + clip.clip_id +
                                 " shorter than one interval");
    FrameSequence seq;
    seq.clip_id = clip.clip_id;
    seq.interval_s = interval_s;
    seq.frames.reserve(static_cast<size_t>(k_max) + 1);
    for (long k = 0; k <= k_max; ++k) {
        const double t = static_cast<double>(k) * interval_s;
        Raster raw;
        try {
            raw = decoder.decode(clip, t);
        } catch (const DecodeError&) {
            throw;
        } catch (const std::exception& e) {
            throw DecodeError(clip.clip_id, t, e.what());
        }
        seq.frames.push_back(normalize_frame(raw));
        seq.frame_times.push_back(t);
    }
    return seq;
}

inline std::string frame_file_name(size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%04zu.png", k);
    return buf;
}

// Writes <dir>/<clip_id>/frame_0000.png ... and a frames.json sidecar.
inline std::vector<std::string> write_frame_dir(const std::filesystem::path& root,
                                                const FrameSequence& seq,
                                                const std::string& provenance_json) {
    const auto dir = root / seq.clip_id;
    std::filesystem::create_directories(dir);
    std::vector<std::string> paths;
    for (size_t k = 0; k < seq.frames.size(); ++k) {
        const auto p = (dir / frame_file_name(k)).string();
        write_png(p, seq.frames[k]);
        paths.push_back(p);
    }
    nlohmann::ordered_json meta;
    meta["clip_id"] = seq.clip_id;
    meta["interval_s"] = seq.interval_s;
    meta["frame_times"] = seq.frame_times;
    meta["count"] = seq.frames.size();
    meta["provenance"] = nlohmann::ordered_json::parse(provenance_json);
    std::ofstream out(dir / "frames.json", std::ios::binary);
    out << meta.dump(2) << "\n";
    return paths;
}

// Reloads a sampled clip from <root>/<clip_id>/ using the frames.json sidecar.
inline FrameSequence read_frame_sequence(const std::filesystem::path& root,
                                         const std::string& clip_id) {
    const auto dir = root / clip_id;
    std::ifstream meta_in(dir / "frames.json", std::ios::binary);
    if (!meta_in)
        throw std::runtime_error("read_frame_sequence: no frames.json under " + dir.string());
    nlohmann::json meta = nlohmann::json::parse(meta_in);
    FrameSequence seq;
    seq.clip_id = meta.at("clip_id").get<std::string>();
    seq.interval_s = meta.at("interval_s").get<double>();
    seq.frame_times = meta.at("frame_times").get<std::vector<double>>();
    const size_t count = meta.at("count").get<size_t>();
    seq.frames.reserve(count);
    for (size_t k = 0; k < count; ++k) seq.frames.push_back(read_png((dir / frame_file_name(k)).string()));
    if (seq.frames.size() != seq.frame_times.size())
        throw std::runtime_error("read_frame_sequence: count mismatch for " + clip_id);
    return seq;
}

} // namespace vista
