// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#include "sst/image.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sst {

ImageMetrics image_metrics(const Image& a, const Image& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("image_metrics: dimension mismatch");
    ImageMetrics m;
    double sq = 0.0, ab = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
        sq += d * d;
        ab += std::fabs(d);
    }
    const auto n = static_cast<double>(a.pixels.size());
    m.rmse = std::sqrt(sq / n);
    m.mae = ab / n;
    return m;
}

void save_pfm(const std::string& path, const Image& image) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "PF\n" << image.width << " " << image.height << "\n-1.0\n";
    // Negative scale marks little-endian; rows bottom-up per convention.
    for (std::uint32_t y = image.height; y-- > 0;)
        out.write(reinterpret_cast<const char*>(image.at(0, y)),
                  static_cast<std::streamsize>(image.width) * 3 * sizeof(float));
    if (!out) throw std::runtime_error("write failure: " + path);
}

Image load_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string header;
    in >> header;
    if (header != "PF") throw std::runtime_error("not a color PFM file: " + path);
    std::uint32_t w, h;
    double scale;
    in >> w >> h >> scale;
    in.get();  // single whitespace after the scale
    if (scale >= 0.0) throw std::runtime_error("big-endian PFM unsupported: " + path);
    Image img(w, h);
    for (std::uint32_t y = h; y-- > 0;)
        in.read(reinterpret_cast<char*>(img.at(0, y)),
                static_cast<std::streamsize>(w) * 3 * sizeof(float));
    if (!in) throw std::runtime_error("truncated PFM: " + path);
    return img;
}

void save_pfm_gray(const std::string& path, std::uint32_t width, std::uint32_t height,
                   const std::vector<float>& values) {
    if (values.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("save_pfm_gray: size mismatch");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "Pf\n" << width << " " << height << "\n-1.0\n";
    for (std::uint32_t y = height; y-- > 0;)
        out.write(reinterpret_cast<const char*>(&values[static_cast<std::size_t>(y) * width]),
                  static_cast<std::streamsize>(width) * sizeof(float));
    if (!out) throw std::runtime_error("write failure: " + path);
}

namespace {

std::uint8_t to_srgb8(float linear) {
    double v = std::fmin(1.0, std::fmax(0.0, static_cast<double>(linear)));
    v = v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
    return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

void png_chunk(std::ofstream& out, const char type[4], const std::vector<std::uint8_t>& data) {
    auto write_be32 = [&out](std::uint32_t v) {
        const std::uint8_t b[4] = {static_cast<std::uint8_t>(v >> 24),
                                   static_cast<std::uint8_t>(v >> 16),
                                   static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
        out.write(reinterpret_cast<const char*>(b), 4);
    };
    write_be32(static_cast<std::uint32_t>(data.size()));
    out.write(type, 4);
    if (!data.empty()) out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    std::uint32_t crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(type), 4);
    if (!data.empty()) crc = crc32(crc, data.data(), static_cast<uInt>(data.size()));
    write_be32(crc);
}

}  // namespace

void save_png(const std::string& path, const Image& image) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    out.write(reinterpret_cast<const char*>(sig), 8);

    std::vector<std::uint8_t> ihdr(13);
    const std::uint32_t w = image.width, h = image.height;
    ihdr[0] = w >> 24; ihdr[1] = w >> 16; ihdr[2] = w >> 8; ihdr[3] = w;
    ihdr[4] = h >> 24; ihdr[5] = h >> 16; ihdr[6] = h >> 8; ihdr[7] = h;
    ihdr[8] = 8;   // bit depth
    ihdr[9] = 2;   // truecolor
    ihdr[10] = ihdr[11] = ihdr[12] = 0;
    png_chunk(out, "IHDR", ihdr);

    // Filter byte 0 per scanline, rows top-down.
    std::vector<std::uint8_t> raw;
    raw.reserve((static_cast<std::size_t>(w) * 3 + 1) * h);
    for (std::uint32_t y = 0; y < h; ++y) {
        raw.push_back(0);
        for (std::uint32_t x = 0; x < w; ++x) {
            const float* px = image.at(x, y);
            raw.push_back(to_srgb8(px[0]));
            raw.push_back(to_srgb8(px[1]));
            raw.push_back(to_srgb8(px[2]));
        }
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> compressed(bound);
    if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
        throw std::runtime_error("PNG deflate failure: " + path);
    compressed.resize(bound);
    png_chunk(out, "IDAT", compressed);
    png_chunk(out, "IEND", {});
    if (!out) throw std::runtime_error("write failure: " + path);
}

}  // namespace sst
