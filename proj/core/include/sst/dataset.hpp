// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sst/rng.hpp"

namespace sst {

/// Summary statistics of one ground-truth walk, in the canonical sphere frame
/// (incoming direction (0,0,1), exit rotated into the x >= 0 half of the
/// xz-plane so that the representative event stays correlated with the exit).
struct TrainingSample {
    float sigma_t = 0.0f;  // sphere-normalized extinction
    float g = 0.0f;
    float phi = 1.0f;
    std::uint32_t n_events = 1;
    float cos_theta = 1.0f;
    float alpha = 0.0f;
    float beta = 0.0f;
    float rep_position[3] = {0.0f, 0.0f, 0.0f};   // X, norm < 1
    float rep_direction[3] = {0.0f, 0.0f, 1.0f};  // W, unit norm
};

/// How the scattering albedo is drawn per sample.
struct PhiSampler {
    enum class Kind : std::uint32_t {
        kLogComplement = 0,  // phi = 1 - 10^u, u uniform in [a, b]
        kFixed = 1,          // phi = a
        kUniform = 2,        // phi uniform in [a, b]
    };
    Kind kind = Kind::kLogComplement;
    double a = -5.0;
    double b = -0.5;

    double sample(RandomStream& rng) const;
};

struct DatasetHeader {
    std::uint32_t version = 1;
    std::uint64_t count = 0;
    float sigma_t_lo = 0.0f, sigma_t_hi = 0.0f;
    float g_lo = 0.0f, g_hi = 0.0f;
    PhiSampler phi;
    std::uint64_t seed = 0;
};

struct Dataset {
    DatasetHeader header;
    std::vector<TrainingSample> samples;

    /// FNV-1a over header fields and sample records; used to tie trained
    /// models to the corpus they saw.
    std::uint64_t fingerprint() const;
};

/// Runs n_samples independent ground-truth walks with material parameters
/// drawn uniformly from the given ranges and packs their summary statistics.
/// Deterministic under (seed); parallel over samples.
Dataset generate_dataset(std::uint64_t n_samples, double sigma_t_lo, double sigma_t_hi,
                         double g_lo, double g_hi, const PhiSampler& phi, std::uint64_t seed);

void save_dataset(const std::string& path, const Dataset& dataset);
Dataset load_dataset(const std::string& path);
void export_dataset_csv(const std::string& path, const Dataset& dataset);

}  // namespace sst
