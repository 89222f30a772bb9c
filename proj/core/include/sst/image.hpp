// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sst {

/// Linear-RGB float framebuffer.
struct Image {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t sample_count = 0;
    std::vector<float> pixels;  // 3 floats per pixel, row 0 at the top

    Image() = default;
    Image(std::uint32_t w, std::uint32_t h)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0.0f) {}

    float* at(std::uint32_t x, std::uint32_t y) {
        return &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
    }
    const float* at(std::uint32_t x, std::uint32_t y) const {
        return &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
    }
};

struct ImageMetrics {
    double rmse = 0.0;
    double mae = 0.0;
};

/// Channel-pooled RMSE / MAE over linear values; dimensions must match.
ImageMetrics image_metrics(const Image& a, const Image& b);

/// Portable float map, little-endian, bottom row first ("PF").
void save_pfm(const std::string& path, const Image& image);
Image load_pfm(const std::string& path);

/// 8-bit sRGB PNG (clamp to [0,1] then the sRGB transfer). Deterministic
/// output bytes for identical input.
void save_png(const std::string& path, const Image& image);

/// Grayscale PFM ("Pf") for auxiliary per-pixel statistics.
void save_pfm_gray(const std::string& path, std::uint32_t width, std::uint32_t height,
                   const std::vector<float>& values);

}  // namespace sst
