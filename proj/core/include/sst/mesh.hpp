// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sst/vec3.hpp"

namespace sst {

struct TriangleMesh {
    std::vector<Vec3> positions;
    std::vector<std::array<std::uint32_t, 3>> faces;
    std::vector<Vec3> face_normals;  // geometric, unit length

    Vec3 vertex(std::uint32_t face, int corner) const {
        return positions[faces[face][corner]];
    }
    std::size_t triangle_count() const { return faces.size(); }

    void compute_face_normals();
    void bounds(Vec3& lo, Vec3& hi) const;

    /// True when every edge is shared by exactly two triangles.
    bool is_watertight() const;
};

struct MeshLoadReport {
    std::size_t dropped_degenerate = 0;
    bool watertight = true;
};

/// OBJ loader (v / f records, fan triangulation, negative indices). Throws
/// std::runtime_error naming the offending line on malformed input.
/// Degenerate faces are dropped and counted. `scale` multiplies positions.
TriangleMesh load_obj(const std::string& path, double scale = 1.0,
                      MeshLoadReport* report = nullptr);

void save_obj(const std::string& path, const TriangleMesh& mesh);

/// Subdivided icosahedron on the sphere of the given radius; watertight and
/// outward-oriented. subdivisions = 3 gives 1280 triangles.
TriangleMesh make_icosphere(int subdivisions, double radius = 1.0);

/// make_icosphere with a radial sinusoidal perturbation; nonconvex but still
/// watertight. Used as the thin-feature stress geometry.
TriangleMesh make_bumpy_sphere(int subdivisions, double radius = 1.0, double amplitude = 0.2,
                               double frequency = 3.0);

/// Exact point-triangle squared distance (Ericson-style region tests).
double point_triangle_distance_squared(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace sst
