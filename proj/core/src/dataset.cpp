// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#include "sst/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sst/parallel.hpp"
#include "sst/serialize.hpp"
#include "sst/sphere_walk.hpp"

namespace sst {

namespace {
constexpr char kMagic[4] = {'S', 'S', 'W', 'K'};
// hg_sample needs g strictly inside (-1, 1); drawing the closed interval is
// allowed, so draws are nudged off the endpoints.
constexpr double kGClamp = 1.0 - 1e-6;
}  // namespace

double PhiSampler::sample(RandomStream& rng) const {
    switch (kind) {
        case Kind::kLogComplement: return 1.0 - std::pow(10.0, rng.uniform(a, b));
        case Kind::kFixed: return a;
        case Kind::kUniform: return rng.uniform(a, b);
    }
    throw std::logic_error("unknown PhiSampler kind");
}

std::uint64_t Dataset::fingerprint() const {
    std::uint64_t h = fnv1a64(&header.version, sizeof header.version);
    h = fnv1a64(&header.count, sizeof header.count, h);
    h = fnv1a64(&header.seed, sizeof header.seed, h);
    for (const auto& s : samples) h = fnv1a64(&s, sizeof s, h);
    return h;
}

Dataset generate_dataset(std::uint64_t n_samples, double sigma_t_lo, double sigma_t_hi,
                         double g_lo, double g_hi, const PhiSampler& phi, std::uint64_t seed) {
    if (n_samples == 0) throw std::invalid_argument("generate_dataset: n_samples must be > 0");
    if (!(sigma_t_lo >= 0.0 && sigma_t_hi >= sigma_t_lo))
        throw std::invalid_argument("generate_dataset: invalid sigma_t range");
    if (!(g_lo >= -1.0 && g_hi <= 1.0 && g_hi >= g_lo))
        throw std::invalid_argument("generate_dataset: invalid g range");

    Dataset ds;
    ds.header.count = n_samples;
    ds.header.sigma_t_lo = static_cast<float>(sigma_t_lo);
    ds.header.sigma_t_hi = static_cast<float>(sigma_t_hi);
    ds.header.g_lo = static_cast<float>(g_lo);
    ds.header.g_hi = static_cast<float>(g_hi);
    ds.header.phi = phi;
    ds.header.seed = seed;
    ds.samples.resize(n_samples);

    parallel_for(n_samples, [&](std::uint64_t i) {
        RandomStream rng(seed, stream_salt::kDataset, i);
        const double sigma_t = rng.uniform(sigma_t_lo, sigma_t_hi);
        double g = rng.uniform(g_lo, g_hi);
        g = std::fmin(kGClamp, std::fmax(-kGClamp, g));
        const double phi_value = phi.sample(rng);

        const WalkRecord walk = walk_unit_sphere(sigma_t, g, rng);
        const ExitParams exit = parameterize_exit(walk);
        const RepresentativeSample rep = sample_representative(walk.events, phi_value, rng);

        // Rotate the walk about z so the exit sits at azimuth zero; this is
        // the frame the exit parameterization implies for (X, W).
        const double psi_exit = std::atan2(walk.exit_position.y, walk.exit_position.x);
        const Mat3 undo = Mat3::rotation_z(-psi_exit);
        const Vec3 x_std = undo * rep.position;
        const Vec3 w_std = undo * rep.direction;

        TrainingSample& s = ds.samples[i];
        s.sigma_t = static_cast<float>(sigma_t);
        s.g = static_cast<float>(g);
        s.phi = static_cast<float>(phi_value);
        s.n_events = walk.n_events();
        s.cos_theta = static_cast<float>(exit.cos_theta);
        s.alpha = static_cast<float>(exit.alpha);
        s.beta = static_cast<float>(exit.beta);
        s.rep_position[0] = static_cast<float>(x_std.x);
        s.rep_position[1] = static_cast<float>(x_std.y);
        s.rep_position[2] = static_cast<float>(x_std.z);
        s.rep_direction[0] = static_cast<float>(w_std.x);
        s.rep_direction[1] = static_cast<float>(w_std.y);
        s.rep_direction[2] = static_cast<float>(w_std.z);
    });
    return ds;
}

void save_dataset(const std::string& path, const Dataset& dataset) {
    BinaryWriter w(path);
    w.magic(kMagic);
    w.u32(dataset.header.version);
    w.u64(dataset.header.count);
    w.f32(dataset.header.sigma_t_lo);
    w.f32(dataset.header.sigma_t_hi);
    w.f32(dataset.header.g_lo);
    w.f32(dataset.header.g_hi);
    w.u32(static_cast<std::uint32_t>(dataset.header.phi.kind));
    w.f32(static_cast<float>(dataset.header.phi.a));
    w.f32(static_cast<float>(dataset.header.phi.b));
    w.u64(dataset.header.seed);
    for (const auto& s : dataset.samples) {
        w.f32(s.sigma_t);
        w.f32(s.g);
        w.f32(s.phi);
        w.u32(s.n_events);
        w.f32(s.cos_theta);
        w.f32(s.alpha);
        w.f32(s.beta);
        w.f32_array(s.rep_position, 3);
        w.f32_array(s.rep_direction, 3);
    }
    w.close();
}

Dataset load_dataset(const std::string& path) {
    BinaryReader r(path);
    r.expect_magic(kMagic, "dataset " + path);
    Dataset ds;
    ds.header.version = r.u32();
    if (ds.header.version != 1)
        throw std::runtime_error("dataset " + path + ": unsupported version");
    ds.header.count = r.u64();
    ds.header.sigma_t_lo = r.f32();
    ds.header.sigma_t_hi = r.f32();
    ds.header.g_lo = r.f32();
    ds.header.g_hi = r.f32();
    ds.header.phi.kind = static_cast<PhiSampler::Kind>(r.u32());
    ds.header.phi.a = r.f32();
    ds.header.phi.b = r.f32();
    ds.header.seed = r.u64();
    ds.samples.resize(ds.header.count);
    for (auto& s : ds.samples) {
        s.sigma_t = r.f32();
        s.g = r.f32();
        s.phi = r.f32();
        s.n_events = r.u32();
        s.cos_theta = r.f32();
        s.alpha = r.f32();
        s.beta = r.f32();
        r.f32_array(s.rep_position, 3);
        r.f32_array(s.rep_direction, 3);
    }
    r.require_ok("dataset " + path);
    return ds;
}

void export_dataset_csv(const std::string& path, const Dataset& dataset) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    std::fputs("sigma_t,g,phi,n_events,cos_theta,alpha,beta,X0,X1,X2,W0,W1,W2\n", f);
    for (const auto& s : dataset.samples) {
        std::fprintf(f, "%.9g,%.9g,%.9g,%u,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                     s.sigma_t, s.g, s.phi, s.n_events, s.cos_theta, s.alpha, s.beta,
                     s.rep_position[0], s.rep_position[1], s.rep_position[2],
                     s.rep_direction[0], s.rep_direction[1], s.rep_direction[2]);
    }
    if (std::fclose(f) != 0) throw std::runtime_error("write failure: " + path);
}

}  // namespace sst
