// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sst/bvh.hpp"
#include "sst/mesh.hpp"

namespace sst {

/// Voxelized conservative distance grid. Values are signed (negative inside
/// the mesh) and already reduced by half the voxel diagonal, so the Euclidean
/// ball of radius |value| around ANY point of the voxel is guaranteed free of
/// surface.
struct SdfGrid {
    Vec3 origin;
    double voxel_size = 0.0;
    std::uint32_t dims[3] = {0, 0, 0};
    std::vector<float> values;
    std::uint64_t mesh_fingerprint = 0;

    std::size_t index(std::uint32_t x, std::uint32_t y, std::uint32_t z) const {
        return (static_cast<std::size_t>(z) * dims[1] + y) * dims[0] + x;
    }
    Vec3 voxel_center(std::uint32_t x, std::uint32_t y, std::uint32_t z) const {
        return origin + Vec3((x + 0.5) * voxel_size, (y + 0.5) * voxel_size,
                             (z + 0.5) * voxel_size);
    }
};

/// Builds the grid with `resolution` voxels along the largest bounding-box
/// axis (plus a one-voxel border). Distances are exact point-triangle minima
/// (BVH pruned), signs come from parity inside-tests (winding-number fallback
/// for non-watertight meshes), and the half-diagonal margin is subtracted.
SdfGrid build_sdf(const TriangleMesh& mesh, const Bvh& bvh, std::uint32_t resolution,
                  std::uint64_t mesh_fingerprint = 0);

/// Safe step radius at a point: |value| of the containing voxel when that
/// value is negative (inside the medium), else 0. Points outside the grid
/// return 0.
double query_safe_radius(const SdfGrid& grid, const Vec3& point);

void save_sdf(const std::string& path, const SdfGrid& grid);
SdfGrid load_sdf(const std::string& path);

/// Loads the cache when present and fingerprint/resolution match, otherwise
/// rebuilds and rewrites it.
SdfGrid load_or_build_sdf(const std::string& cache_path, const TriangleMesh& mesh, const Bvh& bvh,
                          std::uint32_t resolution, std::uint64_t mesh_fingerprint);

}  // namespace sst
