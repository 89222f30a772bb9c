// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#include "sst/sdf.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "sst/parallel.hpp"
#include "sst/serialize.hpp"

namespace sst {

namespace {
constexpr char kMagic[4] = {'S', 'S', 'D', 'F'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

SdfGrid build_sdf(const TriangleMesh& mesh, const Bvh& bvh, std::uint32_t resolution,
                  std::uint64_t mesh_fingerprint) {
    if (resolution < 8) throw std::invalid_argument("build_sdf: resolution must be >= 8");

    Vec3 lo, hi;
    mesh.bounds(lo, hi);
    const Vec3 extent = hi - lo;
    const double max_extent = std::fmax(extent.x, std::fmax(extent.y, extent.z));
    if (!(max_extent > 0.0)) throw std::invalid_argument("build_sdf: empty mesh bounds");

    SdfGrid grid;
    grid.voxel_size = max_extent / resolution;
    grid.origin = lo - Vec3(grid.voxel_size, grid.voxel_size, grid.voxel_size);
    for (int a = 0; a < 3; ++a)
        grid.dims[a] =
            static_cast<std::uint32_t>(std::ceil(extent[a] / grid.voxel_size - 1e-9)) + 2;
    grid.values.resize(static_cast<std::size_t>(grid.dims[0]) * grid.dims[1] * grid.dims[2]);
    grid.mesh_fingerprint = mesh_fingerprint;

    const double half_diagonal = 0.5 * std::sqrt(3.0) * grid.voxel_size;
    const bool watertight = mesh.is_watertight();

    const std::uint64_t slabs = grid.dims[2];
    parallel_for(slabs, [&](std::uint64_t z) {
        for (std::uint32_t y = 0; y < grid.dims[1]; ++y) {
            for (std::uint32_t x = 0; x < grid.dims[0]; ++x) {
                const Vec3 center = grid.voxel_center(x, static_cast<std::uint32_t>(y),
                                                      static_cast<std::uint32_t>(z));
                const double d = bvh.distance(center);
                const bool is_inside =
                    watertight ? bvh.inside(center) : winding_number(mesh, center) > 0.5;
                const double conservative = std::fmax(0.0, d - half_diagonal);
                grid.values[grid.index(x, y, static_cast<std::uint32_t>(z))] =
                    static_cast<float>(is_inside ? -conservative : conservative);
            }
        }
    }, 1);
    return grid;
}

double query_safe_radius(const SdfGrid& grid, const Vec3& point) {
    const Vec3 rel = (point - grid.origin) / grid.voxel_size;
    if (rel.x < 0.0 || rel.y < 0.0 || rel.z < 0.0) return 0.0;
    const auto x = static_cast<std::uint32_t>(rel.x);
    const auto y = static_cast<std::uint32_t>(rel.y);
    const auto z = static_cast<std::uint32_t>(rel.z);
    if (x >= grid.dims[0] || y >= grid.dims[1] || z >= grid.dims[2]) return 0.0;
    const float v = grid.values[grid.index(x, y, z)];
    return v < 0.0f ? -static_cast<double>(v) : 0.0;
}

void save_sdf(const std::string& path, const SdfGrid& grid) {
    BinaryWriter w(path);
    w.magic(kMagic);
    w.u32(kVersion);
    w.u64(grid.mesh_fingerprint);
    for (const auto d : grid.dims) w.u32(d);
    w.f32(static_cast<float>(grid.origin.x));
    w.f32(static_cast<float>(grid.origin.y));
    w.f32(static_cast<float>(grid.origin.z));
    w.f32(static_cast<float>(grid.voxel_size));
    w.f32_array(grid.values.data(), grid.values.size());
    w.close();
}

SdfGrid load_sdf(const std::string& path) {
    BinaryReader r(path);
    r.expect_magic(kMagic, "sdf " + path);
    if (r.u32() != kVersion) throw std::runtime_error("sdf " + path + ": unsupported version");
    SdfGrid grid;
    grid.mesh_fingerprint = r.u64();
    for (auto& d : grid.dims) d = r.u32();
    const float ox = r.f32(), oy = r.f32(), oz = r.f32();
    grid.origin = Vec3(ox, oy, oz);
    grid.voxel_size = r.f32();
    const std::size_t n = static_cast<std::size_t>(grid.dims[0]) * grid.dims[1] * grid.dims[2];
    if (n == 0 || n > (1ull << 32)) throw std::runtime_error("sdf " + path + ": implausible dims");
    grid.values.resize(n);
    r.f32_array(grid.values.data(), n);
    r.require_ok("sdf " + path);
    return grid;
}

SdfGrid load_or_build_sdf(const std::string& cache_path, const TriangleMesh& mesh, const Bvh& bvh,
                          std::uint32_t resolution, std::uint64_t mesh_fingerprint) {
    if (std::ifstream probe(cache_path, std::ios::binary); probe.good()) {
        try {
            SdfGrid cached = load_sdf(cache_path);
            const std::uint32_t max_dim =
                std::max(cached.dims[0], std::max(cached.dims[1], cached.dims[2]));
            if (cached.mesh_fingerprint == mesh_fingerprint && max_dim == resolution + 2)
                return cached;
        } catch (const std::exception&) {
            // stale or corrupt cache, rebuild below
        }
    }
    SdfGrid grid = build_sdf(mesh, bvh, resolution, mesh_fingerprint);
    save_sdf(cache_path, grid);
    return grid;
}

}  // namespace sst
