#pragma once

#include <png.h>

#include <cstring>
#include <stdexcept>
#include <string>

#include "vista/raster.hpp"

namespace vista {

inline void write_png(const std::string& path, const Raster& img) {
    if (img.empty()) throw std::invalid_argument("write_png: empty raster");
    png_image pi;
    std::memset(&pi, 0, sizeof(pi));
    pi.version = PNG_IMAGE_VERSION;
    pi.width = static_cast<png_uint_32>(img.width);
    pi.height = static_cast<png_uint_32>(img.height);
    pi.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&pi, path.c_str(), 0, img.rgb.data(), 0, nullptr))
        throw std::runtime_error("write_png: " + path + ": " + pi.message);
}

inline std::string encode_png(const Raster& img) {
    if (img.empty()) throw std::invalid_argument("encode_png: empty raster");
    png_image pi;
    std::memset(&pi, 0, sizeof(pi));
    pi.version = PNG_IMAGE_VERSION;
    pi.width = static_cast<png_uint_32>(img.width);
    pi.height = static_cast<png_uint_32>(img.height);
    pi.format = PNG_FORMAT_RGB;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&pi, nullptr, &size, 0, img.rgb.data(), 0, nullptr))
        throw std::runtime_error(std::string("encode_png: size probe: ") + pi.message);
    std::string out(size, '\0');
    if (!png_image_write_to_memory(&pi, out.data(), &size, 0, img.rgb.data(), 0, nullptr))
        throw std::runtime_error(std::string("encode_png: ") + pi.message);
    out.resize(size);
    return out;
}

inline Raster read_png(const std::string& path) {
    png_image pi;
    std::memset(&pi, 0, sizeof(pi));
    pi.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&pi, path.c_str()))
        throw std::runtime_error("read_png: " + path + ": " + pi.message);
    pi.format = PNG_FORMAT_RGB;
    Raster img;
    img.width = static_cast<int>(pi.width);
    img.height = static_cast<int>(pi.height);
    img.rgb.resize(PNG_IMAGE_SIZE(pi));
    if (!png_image_finish_read(&pi, nullptr, img.rgb.data(), 0, nullptr))
        throw std::runtime_error("read_png: " + path + ": " + pi.message);
    return img;
}

} // namespace vista
