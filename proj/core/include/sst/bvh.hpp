// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sst/mesh.hpp"

namespace sst {

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit length
    double t_max = 1e300;
};

struct Hit {
    double t = 0.0;
    std::uint32_t triangle = 0;
    Vec3 geometric_normal;  // as stored on the mesh (orientation preserved)
    Vec3 shading_normal;    // oriented against the ray
};

/// Midpoint-split bounding volume hierarchy over mesh triangles.
class Bvh {
  public:
    explicit Bvh(const TriangleMesh& mesh);

    /// Nearest hit with t in (t_min, ray.t_max).
    std::optional<Hit> intersect(const Ray& ray, double t_min = 1e-9) const;

    /// All hits with t in (t_min, ray.t_max), sorted by t. Used for parity
    /// inside-tests and in-medium segment accumulation on shadow rays.
    void intersect_all(const Ray& ray, std::vector<Hit>& hits, double t_min = 1e-9) const;

    /// Smallest point-triangle distance over the mesh (exact, node-pruned).
    double distance(const Vec3& point) const;

    /// Parity inside-test: majority vote over three fixed ray directions.
    bool inside(const Vec3& point) const;

    const TriangleMesh& mesh() const { return *mesh_; }

  private:
    struct Node {
        Vec3 lo, hi;
        std::uint32_t left = 0;   // interior: left child index
        std::uint32_t first = 0;  // leaf: first triangle; interior: right child
        std::uint32_t count = 0;  // leaf: triangle count (0 for interior)
    };

    std::uint32_t build(std::uint32_t begin, std::uint32_t end);

    const TriangleMesh* mesh_ = nullptr;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> order_;  // triangle indices, leaf-contiguous
    std::vector<Vec3> centroids_;
};

/// Watertight-enough Moller-Trumbore triangle intersection; returns t or
/// nothing.
std::optional<double> ray_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c,
                                   double t_min);

/// Generalized winding number of the mesh around a point (fallback inside
/// test for non-watertight geometry).
double winding_number(const TriangleMesh& mesh, const Vec3& point);

}  // namespace sst
