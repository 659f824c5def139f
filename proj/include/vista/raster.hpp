#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace vista {

inline constexpr int kModelSide = 224;
inline constexpr int kPixelBudget = kModelSide * kModelSide; // 50,176

// Packed 8-bit RGB image, row-major.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb; // width * height * 3 bytes

    bool empty() const { return width <= 0 || height <= 0; }
    size_t byte_count() const { return static_cast<size_t>(width) * height * 3; }

    std::uint8_t* pixel(int x, int y) { return rgb.data() + (static_cast<size_t>(y) * width + x) * 3; }
    const std::uint8_t* pixel(int x, int y) const {
        return rgb.data() + (static_cast<size_t>(y) * width + x) * 3;
    }

    static Raster filled(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        Raster img;
        img.width = w;
        img.height = h;
        img.rgb.resize(static_cast<size_t>(w) * h * 3);
        for (size_t i = 0; i < img.rgb.size(); i += 3) {
            img.rgb[i] = r;
            img.rgb[i + 1] = g;
            img.rgb[i + 2] = b;
        }
        return img;
    }

    bool operator==(const Raster& o) const {
        return width == o.width && height == o.height && rgb == o.rgb;
    }
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ull;
    x ^= x >> 33;
    return x;
}

} // namespace detail

// Deterministic procedural frame, keyed by (seed, frame index). Integer-only so the
// bytes are identical on every run and platform.
inline Raster synthetic_raster(std::uint64_t seed, int frame_index, int w, int h) {
    Raster img;
    img.width = w;
    img.height = h;
    img.rgb.resize(static_cast<size_t>(w) * h * 3);
    const std::uint64_t base = detail::mix64(seed * 0x9e3779b97f4a7c15ull + 0xda3e39cb94b95bdbull);
    const std::uint64_t phase = detail::mix64(base + static_cast<std::uint64_t>(frame_index) * 0xbf58476d1ce4e5b9ull);
    const int cx = static_cast<int>((phase >> 8) % static_cast<std::uint64_t>(w));
    const int cy = static_cast<int>((phase >> 24) % static_cast<std::uint64_t>(h));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t* p = img.pixel(x, y);
            const int dx = x - cx, dy = y - cy;
            const unsigned d = static_cast<unsigned>(dx * dx + dy * dy);
            p[0] = static_cast<std::uint8_t>((x * 5 + (base & 0xff)) ^ (d >> 6));
            p[1] = static_cast<std::uint8_t>((y * 3 + ((base >> 8) & 0xff)) ^ (d >> 7));
            p[2] = static_cast<std::uint8_t>(((x + y) * 2 + ((base >> 16) & 0xff)) ^ (frame_index * 11));
        }
    }
    return img;
}

// Largest centered square crop: side = min(w, h), offsets floor((dim - side) / 2).
struct CropWindow {
    int x0, y0, side;
};

inline CropWindow center_square_window(int w, int h) {
    const int side = w < h ? w : h;
    return CropWindow{(w - side) / 2, (h - side) / 2, side};
}

inline Raster crop(const Raster& src, const CropWindow& win) {
    Raster out;
    out.width = win.side;
    out.height = win.side;
    out.rgb.resize(static_cast<size_t>(win.side) * win.side * 3);
    for (int y = 0; y < win.side; ++y) {
        const std::uint8_t* s = src.pixel(win.x0, win.y0 + y);
        std::uint8_t* d = out.pixel(0, y);
        std::copy(s, s + static_cast<size_t>(win.side) * 3, d);
    }
    return out;
}

// Bilinear resample of a square raster to target x target.
inline Raster scale_square(const Raster& src, int target) {
    if (src.width == target && src.height == target) return src;
    Raster out;
    out.width = target;
    out.height = target;
    out.rgb.resize(static_cast<size_t>(target) * target * 3);
    const double ratio = static_cast<double>(src.width) / target;
    for (int y = 0; y < target; ++y) {
        double sy = (y + 0.5) * ratio - 0.5;
        if (sy < 0) sy = 0;
        int y0 = static_cast<int>(sy);
        int y1 = y0 + 1 < src.height ? y0 + 1 : src.height - 1;
        const double fy = sy - y0;
        for (int x = 0; x < target; ++x) {
            double sx = (x + 0.5) * ratio - 0.5;
            if (sx < 0) sx = 0;
            int x0 = static_cast<int>(sx);
            int x1 = x0 + 1 < src.width ? x0 + 1 : src.width - 1;
            const double fx = sx - x0;
            const std::uint8_t* p00 = src.pixel(x0, y0);
            const std::uint8_t* p10 = src.pixel(x1, y0);
            const std::uint8_t* p01 = src.pixel(x0, y1);
            const std::uint8_t* p11 = src.pixel(x1, y1);
            std::uint8_t* d = out.pixel(x, y);
            for (int c = 0; c < 3; ++c) {
                const double top = p00[c] + (p10[c] - p00[c]) * fx;
                const double bot = p01[c] + (p11[c] - p01[c]) * fx;
                const double v = top + (bot - top) * fy;
                d[c] = static_cast<std::uint8_t>(std::lround(v < 0 ? 0 : (v > 255 ? 255 : v)));
            }
        }
    }
    return out;
}

// Center-crop to square, then scale to 224x224. A 224x224 input passes through
// byte-identical.
inline Raster normalize_frame(const Raster& src) {
    if (src.empty()) throw std::invalid_argument("normalize_frame: empty raster");
    if (src.width == kModelSide && src.height == kModelSide) return src;
    return scale_square(crop(src, center_square_window(src.width, src.height)), kModelSide);
}

} // namespace vista
