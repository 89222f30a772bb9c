// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#include "sst/sphere_walk.hpp"

#include <cmath>
#include <stdexcept>

namespace sst {

namespace {

// Positive root of |pos + t dir| = radius for a start point strictly inside.
double sphere_exit_t(const Vec3& pos, const Vec3& dir, double radius) {
    const double b = dot(pos, dir);
    const double c = length_squared(pos) - radius * radius;
    return -b + std::sqrt(std::fmax(0.0, b * b - c));
}

}  // namespace

WalkRecord walk_sphere(double sigma_t, double g, double radius, RandomStream& rng) {
    if (!(sigma_t >= 0.0)) throw std::domain_error("walk_sphere: sigma_t must be >= 0");
    if (!(radius > 0.0)) throw std::domain_error("walk_sphere: radius must be > 0");

    WalkRecord rec;
    rec.radius = radius;
    rec.events.push_back({Vec3(0.0, 0.0, 0.0), Vec3(0.0, 0.0, 1.0)});

    const bool vacuum = sigma_t <= kVacuumSigmaT;
    Vec3 pos(0.0, 0.0, 0.0);
    Vec3 incoming(0.0, 0.0, 1.0);

    for (;;) {
        const Vec3 dir = hg_sample(g, incoming, rng.uniform(), rng.uniform());
        double step = vacuum ? 2.0 * radius : sample_free_path(sigma_t, rng.uniform());
        const double t_exit = sphere_exit_t(pos, dir, radius);
        if (vacuum || step >= t_exit) {
            rec.exit_position = pos + dir * t_exit;
            rec.exit_direction = dir;
            return rec;
        }
        pos += dir * step;
        rec.events.push_back({pos, dir});
        incoming = dir;
        if (rec.events.size() > kMaxWalkEvents)
            throw std::runtime_error("walk_sphere: event cap exceeded (sigma_t " +
                                     std::to_string(sigma_t) + ", g " + std::to_string(g) + ")");
    }
}

ExitParams parameterize_exit(const WalkRecord& record) {
    const Vec3 w_in = record.events.front().incoming_direction;
    const Vec3 x_hat = record.exit_position / record.radius;
    const Vec3 w_out = record.exit_direction;

    ExitParams p;
    p.cos_theta = dot(w_in, x_hat);

    Vec3 e_b;
    if (std::fabs(p.cos_theta) > 1.0 - 1e-9) {
        // Degenerate frame: any fixed completion works, the (alpha, beta)
        // distribution is azimuth-symmetric here.
        Vec3 b2;
        orthonormal_basis(x_hat, e_b, b2);
    } else {
        e_b = normalize(cross(w_in, x_hat));
    }
    const Vec3 e_t = cross(e_b, x_hat);
    p.alpha = dot(w_out, e_b);
    p.beta = dot(w_out, e_t);
    return p;
}

RepresentativeSample sample_representative(const std::vector<WalkEvent>& events, double phi,
                                           RandomStream& rng) {
    if (events.empty()) throw std::domain_error("sample_representative: empty event list");
    if (!(phi >= 0.0 && phi <= 1.0)) throw std::domain_error("albedo phi must lie in [0, 1]");

    const auto n = static_cast<std::uint64_t>(events.size());
    RepresentativeSample out;
    out.lambda = representative_weight_sum(n, phi);

    std::uint64_t k = 1;
    if (phi <= 0.0) {
        k = 1;  // all-zero weights, flagged by lambda = 0
    } else if (phi >= 1.0) {
        k = 1 + std::min<std::uint64_t>(n - 1, static_cast<std::uint64_t>(rng.uniform() * static_cast<double>(n)));
    } else {
        // Closed-form inversion of the geometric CDF phi(1-phi^k)/(1-phi).
        const double u = rng.uniform();
        const double phi_n = std::exp(static_cast<double>(n) * std::log(phi));
        const double target = 1.0 - u * (1.0 - phi_n);
        k = static_cast<std::uint64_t>(std::ceil(std::log(target) / std::log(phi)));
        k = std::max<std::uint64_t>(1, std::min(k, n));
    }

    out.index = static_cast<std::uint32_t>(k);
    out.position = events[k - 1].position;
    out.direction = events[k - 1].incoming_direction;
    return out;
}

}  // namespace sst
