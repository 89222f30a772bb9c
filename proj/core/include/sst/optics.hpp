// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "sst/rng.hpp"
#include "sst/vec3.hpp"

namespace sst {

/// Optical description of one homogeneous medium channel. sigma_t in inverse
/// length units, g the Henyey-Greenstein anisotropy in (-1, 1), phi the
/// scattering albedo sigma_s / sigma_t in [0, 1].
struct MediumParams {
    double sigma_t = 0.0;
    double g = 0.0;
    double phi = 1.0;

    double sigma_a() const { return sigma_t * (1.0 - phi); }
    double sigma_s() const { return sigma_t * phi; }

    /// Throws std::domain_error when any field is out of range.
    void validate() const;
};

/// Henyey-Greenstein density over the sphere [1/sr] at the given cosine
/// between incoming and outgoing propagation directions.
double hg_eval(double g, double cos_angle);

/// Inverse-CDF cosine for HG scattering. Oriented so that u = 0 maps to the
/// most forward-reachable cosine and u -> 1 to the most backward one; for
/// |g| < 1e-4 falls back to the isotropic branch 1 - 2u.
double hg_sample_cos(double g, double u);

/// Scattered direction around w_in: cosine via hg_sample_cos(g, u1), azimuth
/// 2*pi*u2 in a fixed orthonormal completion of w_in.
Vec3 hg_sample(double g, const Vec3& w_in, double u1, double u2);

/// Beer-Lambert transmittance exp(-sigma_t * distance), distance >= 0.
double transmittance(double sigma_t, double distance);

/// Exponential free-path length -log(1 - xi) / sigma_t. Requires
/// sigma_t > 0; callers handle vacuum transport themselves.
double sample_free_path(double sigma_t, double xi);

/// Probability 1 - phi^n that a path of n scattering events is absorbed
/// before completing all of them.
double absorption_prob(std::uint64_t n_events, double phi);

/// Survival-weight normalizer sum_{k=1..n} phi^k used when drawing one
/// representative event out of n (0 when phi = 0, n when phi = 1).
double representative_weight_sum(std::uint64_t n_events, double phi);

}  // namespace sst
