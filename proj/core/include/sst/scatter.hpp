// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <string>

#include "sst/cvae.hpp"
#include "sst/rng.hpp"
#include "sst/vec3.hpp"

namespace sst {

/// Decoder evaluation counters (per model family). Incremented by the
/// sampling wrappers; renders snapshot them for exact bookkeeping.
struct DecodeCounters {
    std::atomic<std::uint64_t> length{0};
    std::atomic<std::uint64_t> path{0};
    std::atomic<std::uint64_t> event{0};

    std::uint64_t total() const { return length + path + event; }
    void reset() { length = 0; path = 0; event = 0; }
};

/// The trained model triple plus shared evaluation counters.
struct ScatterModels {
    CvaeModel length;
    CvaeModel path;
    CvaeModel event;
    mutable DecodeCounters counters;

    ScatterModels() = default;
    ScatterModels(CvaeModel l, CvaeModel p, CvaeModel e);

    /// Loads lengthgen.ssnn / pathgen.ssnn / eventgen.ssnn from a directory.
    static ScatterModels load_dir(const std::string& dir);
};

/// sigma_t -> sigma_t * r_sphere (both >= 0): walks in a radius-r sphere are
/// distributionally identical to unit-sphere walks at the rescaled
/// extinction.
double rescale_sigma(double sigma_t_world, double r_sphere);

/// Number of scattering events N >= 1 from the length model. Resamples once
/// on a non-finite decoder output, then throws.
std::uint32_t sample_num_events(const ScatterModels& models, double sigma_t_scaled, double g,
                                RandomStream& rng);

/// Bernoulli absorption draw: true when u < 1 - phi^N.
bool test_absorption(std::uint64_t n_events, double phi, double u);

struct ExitSample {
    double cos_theta = 1.0;
    double alpha = 0.0;
    double beta = 0.0;
};

/// Exit parameters from the path model; cos_theta clamped to [-1, 1] and
/// (alpha, beta) projected into the unit disk.
ExitSample sample_exit(const ScatterModels& models, double sigma_t_scaled, double g,
                       std::uint32_t n_events, RandomStream& rng);

/// World-space placement of one sphere step: rotation mapping the canonical
/// frame (incoming direction (0,0,1), exit azimuth psi) onto the world frame.
struct SphereFrame {
    Mat3 rotation;  // R_cvae * R_psi
    Vec3 center;
    double radius = 1.0;

    Vec3 point_to_world(const Vec3& p_cvae) const { return center + rotation * p_cvae * radius; }
    Vec3 direction_to_world(const Vec3& d_cvae) const { return rotation * d_cvae; }
};

SphereFrame make_sphere_frame(const Vec3& w_in_world, const Vec3& center, double r_sphere,
                              double psi);

struct WorldExit {
    Vec3 position;
    Vec3 direction;
    SphereFrame frame;
};

/// Places canonical exit parameters into the world: exit position via the
/// rotated (sin theta, 0, cos theta), exit direction recombined from
/// (alpha, beta) with a positive (outward) normal component.
WorldExit to_world(double cos_theta, double alpha, double beta, const Vec3& w_in_world,
                   const Vec3& center, double r_sphere, double psi);

struct EventSample {
    Vec3 position_world;   // inside the step sphere
    Vec3 direction_world;  // unit incoming direction at the event
};

/// Representative in-scattering event from the event model, transformed with
/// the same frame as the accompanying exit. X is projected to radius 0.999
/// (canonical units) when the decoder leaves the ball; W is normalized.
EventSample sample_event(const ScatterModels& models, double sigma_t_scaled, double g, double phi,
                         double cos_theta, double alpha, double beta, std::uint32_t n_events,
                         RandomStream& rng, const SphereFrame& frame);

/// Outcome of one full factorized sphere step (length -> absorption ->
/// exit -> optional representative event.)
struct SphereStepOutcome {
    bool absorbed = false;
    std::uint32_t n_events = 1;
    Vec3 exit_position_world;
    Vec3 exit_direction_world;
    bool has_representative = false;
    Vec3 rep_position_world;
    Vec3 rep_direction_world;
    double lambda_weight = 0.0;  // sum_{k=1..N} phi^k
};

/// Runs the factorization in order. Absorbed outcomes evaluate exactly one
/// decoder (the length model); the representative event is sampled only when
/// with_event is set and the path survived.
SphereStepOutcome sample_sphere_step(const ScatterModels& models, double sigma_t_world,
                                     double g, double phi, const Vec3& w_in_world,
                                     const Vec3& center, double r_sphere, bool with_event,
                                     RandomStream& rng);

}  // namespace sst
