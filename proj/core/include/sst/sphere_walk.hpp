// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "sst/optics.hpp"
#include "sst/rng.hpp"
#include "sst/vec3.hpp"

namespace sst {

/// One scattering event: where it happened and the propagation direction the
/// path arrived with.
struct WalkEvent {
    Vec3 position;
    Vec3 incoming_direction;
};

/// A complete multiple-scattering walk inside a sphere centered at the
/// origin. The walk starts with a forced scattering event at the center with
/// incoming direction (0,0,1) and ends at the first boundary crossing.
struct WalkRecord {
    std::vector<WalkEvent> events;
    Vec3 exit_position;   // exact segment-sphere intersection, norm = radius
    Vec3 exit_direction;  // propagation direction at the crossing
    double radius = 1.0;

    std::uint32_t n_events() const { return static_cast<std::uint32_t>(events.size()); }
};

inline constexpr double kVacuumSigmaT = 1e-6;
inline constexpr std::uint64_t kMaxWalkEvents = 1'000'000;

/// Simulates a walk in a sphere of the given radius. No absorption is applied
/// during the walk; absorption is factored out analytically via phi^N.
/// sigma_t <= kVacuumSigmaT is treated as vacuum (single forced event, exit
/// along the first sampled direction). Throws std::runtime_error when the
/// event cap is exceeded.
WalkRecord walk_sphere(double sigma_t, double g, double radius, RandomStream& rng);

inline WalkRecord walk_unit_sphere(double sigma_t, double g, RandomStream& rng) {
    return walk_sphere(sigma_t, g, 1.0, rng);
}

/// Rotation-invariant exit parameterization. cos_theta is the cosine between
/// the walk's incoming direction and the exit position; (alpha, beta) are the
/// outgoing direction's projections on the binormal/tangent of the frame
///   e_n = x_hat, e_b = normalize(w_in x x_hat), e_t = e_b x e_n.
struct ExitParams {
    double cos_theta = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

ExitParams parameterize_exit(const WalkRecord& record);

/// One event drawn from the walk with probability phi^k / Lambda (k = 1..N),
/// plus the weight sum Lambda itself for estimator weighting. phi = 0
/// degenerates to the first event with lambda = 0.
struct RepresentativeSample {
    Vec3 position;
    Vec3 direction;     // incoming propagation direction at the event
    double lambda = 0.0;
    std::uint32_t index = 1;  // 1-based k
};

RepresentativeSample sample_representative(const std::vector<WalkEvent>& events, double phi,
                                           RandomStream& rng);

}  // namespace sst
