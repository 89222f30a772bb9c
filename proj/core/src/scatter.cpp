// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#include "sst/scatter.hpp"

#include <cmath>
#include <stdexcept>

#include "sst/optics.hpp"

namespace sst {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;

void check_kind(const CvaeModel& m, ModelKind kind, const char* what) {
    if (m.kind != kind)
        throw std::runtime_error(std::string(what) + ": model bundle has wrong kind tag");
}
}  // namespace

ScatterModels::ScatterModels(CvaeModel l, CvaeModel p, CvaeModel e)
    : length(std::move(l)), path(std::move(p)), event(std::move(e)) {
    check_kind(length, ModelKind::kLength, "ScatterModels");
    check_kind(path, ModelKind::kPath, "ScatterModels");
    check_kind(event, ModelKind::kEvent, "ScatterModels");
}

ScatterModels ScatterModels::load_dir(const std::string& dir) {
    return ScatterModels(load_model(dir + "/lengthgen.ssnn"), load_model(dir + "/pathgen.ssnn"),
                         load_model(dir + "/eventgen.ssnn"));
}

double rescale_sigma(double sigma_t_world, double r_sphere) {
    if (!(sigma_t_world >= 0.0 && r_sphere >= 0.0))
        throw std::domain_error("rescale_sigma: negative input");
    return sigma_t_world * r_sphere;
}

namespace {

/// Draws z ~ N(0, I_L) and eps ~ N(0, I_P) and decodes; retries once on a
/// non-finite output.
std::vector<double> decode_with_retry(const CvaeModel& model, std::span<const double> c,
                                      RandomStream& rng, std::atomic<std::uint64_t>& counter) {
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::vector<double> z(model.spec.latent), eps(model.spec.p_out);
        for (auto& v : z) v = rng.normal();
        for (auto& v : eps) v = rng.normal();
        counter.fetch_add(1, std::memory_order_relaxed);
        std::vector<double> out = cvae_decode_sample(model, z, c, eps);
        bool finite = true;
        for (const double v : out) finite = finite && std::isfinite(v);
        if (finite) return out;
    }
    throw std::runtime_error(std::string("decoder produced non-finite output twice (") +
                             model_kind_name(model.kind) + ")");
}

}  // namespace

std::uint32_t sample_num_events(const ScatterModels& models, double sigma_t_scaled, double g,
                                RandomStream& rng) {
    if (!(sigma_t_scaled >= 0.0)) throw std::domain_error("sample_num_events: negative sigma_t");
    const auto c = condition_length(models.length.norms, sigma_t_scaled, g);
    const auto out = decode_with_retry(models.length, c, rng, models.counters.length);
    const double n = models.length.norms.denormalize_n(out[0]);
    if (!(n < 4e9)) return 4000000000u;  // tail guard, absorbed almost surely downstream
    return static_cast<std::uint32_t>(std::fmax(1.0, std::round(n)));
}

bool test_absorption(std::uint64_t n_events, double phi, double u) {
    return u < absorption_prob(n_events, phi);
}

ExitSample sample_exit(const ScatterModels& models, double sigma_t_scaled, double g,
                       std::uint32_t n_events, RandomStream& rng) {
    const auto c = condition_path(models.path.norms, sigma_t_scaled, g, n_events);
    const auto out = decode_with_retry(models.path, c, rng, models.counters.path);
    ExitSample e;
    e.cos_theta = std::fmin(1.0, std::fmax(-1.0, out[0]));
    e.alpha = out[1];
    e.beta = out[2];
    const double r2 = e.alpha * e.alpha + e.beta * e.beta;
    if (r2 > 1.0) {
        const double inv = 1.0 / std::sqrt(r2);
        e.alpha *= inv;
        e.beta *= inv;
    }
    return e;
}

SphereFrame make_sphere_frame(const Vec3& w_in_world, const Vec3& center, double r_sphere,
                              double psi) {
    SphereFrame f;
    f.rotation = Mat3::frame_to(w_in_world) * Mat3::rotation_z(psi);
    f.center = center;
    f.radius = r_sphere;
    return f;
}

WorldExit to_world(double cos_theta, double alpha, double beta, const Vec3& w_in_world,
                   const Vec3& center, double r_sphere, double psi) {
    if (!(r_sphere > 0.0)) throw std::domain_error("to_world: r_sphere must be > 0");
    WorldExit we;
    we.frame = make_sphere_frame(w_in_world, center, r_sphere, psi);

    const double sin_theta = std::sqrt(std::fmax(0.0, 1.0 - cos_theta * cos_theta));
    const Vec3 exit_cvae(sin_theta, 0.0, cos_theta);
    we.position = we.frame.point_to_world(exit_cvae);

    // Local frame at the canonical exit: e_n = exit, e_b = z x exit
    // normalized, e_t = e_b x e_n; degenerate when the exit is on the axis.
    Vec3 e_n = exit_cvae;
    Vec3 e_b;
    if (sin_theta < 1e-9) {
        Vec3 b2;
        orthonormal_basis(e_n, e_b, b2);
    } else {
        e_b = normalize(cross(Vec3(0.0, 0.0, 1.0), exit_cvae));
    }
    const Vec3 e_t = cross(e_b, e_n);
    // The missing normal component is reconstructed outward: the path has
    // crossed the boundary from inside.
    const double n_comp = std::sqrt(std::fmax(0.0, 1.0 - alpha * alpha - beta * beta));
    const Vec3 dir_cvae = normalize(e_b * alpha + e_t * beta + e_n * n_comp);
    we.direction = we.frame.direction_to_world(dir_cvae);
    return we;
}

EventSample sample_event(const ScatterModels& models, double sigma_t_scaled, double g, double phi,
                         double cos_theta, double alpha, double beta, std::uint32_t n_events,
                         RandomStream& rng, const SphereFrame& frame) {
    const auto c = condition_event(models.event.norms, sigma_t_scaled, g, phi, cos_theta, alpha,
                                   beta, n_events);
    const auto out = decode_with_retry(models.event, c, rng, models.counters.event);

    Vec3 x(out[0], out[1], out[2]);
    const double len_x = length(x);
    if (len_x >= 1.0) x *= 0.999 / len_x;

    Vec3 w(out[3], out[4], out[5]);
    const double len_w = length(w);
    w = len_w > 0.0 ? w / len_w : Vec3(0.0, 0.0, 1.0);

    EventSample ev;
    ev.position_world = frame.point_to_world(x);
    ev.direction_world = frame.direction_to_world(w);
    return ev;
}

SphereStepOutcome sample_sphere_step(const ScatterModels& models, double sigma_t_world, double g,
                                     double phi, const Vec3& w_in_world, const Vec3& center,
                                     double r_sphere, bool with_event, RandomStream& rng) {
    SphereStepOutcome out;
    const double sigma_scaled = rescale_sigma(sigma_t_world, r_sphere);
    out.n_events = sample_num_events(models, sigma_scaled, g, rng);
    if (test_absorption(out.n_events, phi, rng.uniform())) {
        out.absorbed = true;
        return out;
    }
    const ExitSample exit = sample_exit(models, sigma_scaled, g, out.n_events, rng);
    const double psi = kTwoPi * rng.uniform();
    const WorldExit we = to_world(exit.cos_theta, exit.alpha, exit.beta, w_in_world, center,
                                  r_sphere, psi);
    out.exit_position_world = we.position;
    out.exit_direction_world = we.direction;
    if (with_event) {
        const EventSample ev = sample_event(models, sigma_scaled, g, phi, exit.cos_theta,
                                            exit.alpha, exit.beta, out.n_events, rng, we.frame);
        out.has_representative = true;
        out.rep_position_world = ev.position_world;
        out.rep_direction_world = ev.direction_world;
        out.lambda_weight = representative_weight_sum(out.n_events, phi);
    }
    return out;
}

}  // namespace sst
