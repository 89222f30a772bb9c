// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#include "sst/mesh.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sst {

void TriangleMesh::compute_face_normals() {
    face_normals.resize(faces.size());
    for (std::size_t i = 0; i < faces.size(); ++i) {
        const Vec3 n = cross(vertex(i, 1) - vertex(i, 0), vertex(i, 2) - vertex(i, 0));
        const double len = length(n);
        face_normals[i] = len > 0.0 ? n / len : Vec3(0.0, 0.0, 1.0);
    }
}

void TriangleMesh::bounds(Vec3& lo, Vec3& hi) const {
    lo = Vec3(1e300, 1e300, 1e300);
    hi = Vec3(-1e300, -1e300, -1e300);
    for (const auto& p : positions) {
        lo = min(lo, p);
        hi = max(hi, p);
    }
}

bool TriangleMesh::is_watertight() const {
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
    for (const auto& f : faces) {
        for (int e = 0; e < 3; ++e) {
            std::uint32_t a = f[e], b = f[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            edges[{a, b}] += 1;
        }
    }
    for (const auto& [edge, count] : edges)
        if (count != 2) return false;
    return !faces.empty();
}

namespace {

std::uint32_t parse_obj_index(const std::string& token, std::size_t vertex_count,
                              std::size_t line_no) {
    // "v", "v/vt", "v//vn", "v/vt/vn"; negative indices count from the end.
    const std::size_t slash = token.find('/');
    const std::string head = slash == std::string::npos ? token : token.substr(0, slash);
    long idx = 0;
    try {
        idx = std::stol(head);
    } catch (const std::exception&) {
        throw std::runtime_error("OBJ parse error at line " + std::to_string(line_no) +
                                 ": bad face index '" + token + "'");
    }
    if (idx < 0) idx = static_cast<long>(vertex_count) + idx + 1;
    if (idx < 1 || static_cast<std::size_t>(idx) > vertex_count)
        throw std::runtime_error("OBJ parse error at line " + std::to_string(line_no) +
                                 ": face index out of range '" + token + "'");
    return static_cast<std::uint32_t>(idx - 1);
}

bool face_degenerate(const TriangleMesh& mesh, const std::array<std::uint32_t, 3>& f) {
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) return true;
    const Vec3 n = cross(mesh.positions[f[1]] - mesh.positions[f[0]],
                         mesh.positions[f[2]] - mesh.positions[f[0]]);
    return length_squared(n) <= 0.0;
}

}  // namespace

TriangleMesh load_obj(const std::string& path, double scale, MeshLoadReport* report) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mesh: " + path);

    TriangleMesh mesh;
    MeshLoadReport local;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z))
                throw std::runtime_error("OBJ parse error at line " + std::to_string(line_no) +
                                         ": bad vertex");
            mesh.positions.push_back(Vec3(x, y, z) * scale);
        } else if (tag == "f") {
            std::vector<std::uint32_t> idx;
            std::string token;
            while (ls >> token) idx.push_back(parse_obj_index(token, mesh.positions.size(), line_no));
            if (idx.size() < 3)
                throw std::runtime_error("OBJ parse error at line " + std::to_string(line_no) +
                                         ": face needs at least 3 vertices");
            for (std::size_t k = 2; k < idx.size(); ++k) {
                const std::array<std::uint32_t, 3> f{idx[0], idx[k - 1], idx[k]};
                if (face_degenerate(mesh, f))
                    ++local.dropped_degenerate;
                else
                    mesh.faces.push_back(f);
            }
        }
        // All other records (vn, vt, usemtl, ...) are ignored.
    }
    if (mesh.positions.empty() || mesh.faces.empty())
        throw std::runtime_error("OBJ file has no usable geometry: " + path);
    mesh.compute_face_normals();
    local.watertight = mesh.is_watertight();
    if (!local.watertight)
        std::fprintf(stderr, "warning: mesh %s is not watertight; inside tests fall back to winding numbers\n",
                     path.c_str());
    if (report) *report = local;
    return mesh;
}

void save_obj(const std::string& path, const TriangleMesh& mesh) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& p : mesh.positions) std::fprintf(f, "v %.9g %.9g %.9g\n", p.x, p.y, p.z);
    for (const auto& face : mesh.faces)
        std::fprintf(f, "f %u %u %u\n", face[0] + 1, face[1] + 1, face[2] + 1);
    if (std::fclose(f) != 0) throw std::runtime_error("write failure: " + path);
}

namespace {

struct IcosphereBuilder {
    std::vector<Vec3> verts;
    std::vector<std::array<std::uint32_t, 3>> faces;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint_cache;

    std::uint32_t midpoint(std::uint32_t a, std::uint32_t b) {
        const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
        const auto it = midpoint_cache.find(key);
        if (it != midpoint_cache.end()) return it->second;
        const Vec3 m = normalize(verts[a] + verts[b]);
        verts.push_back(m);
        const auto idx = static_cast<std::uint32_t>(verts.size() - 1);
        midpoint_cache.emplace(key, idx);
        return idx;
    }
};

}  // namespace

TriangleMesh make_icosphere(int subdivisions, double radius) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    IcosphereBuilder b;
    const double raw[12][3] = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                               {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                               {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    for (const auto& v : raw) b.verts.push_back(normalize(Vec3(v[0], v[1], v[2])));
    b.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
               {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
               {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
               {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (int s = 0; s < subdivisions; ++s) {
        std::vector<std::array<std::uint32_t, 3>> next;
        next.reserve(b.faces.size() * 4);
        for (const auto& f : b.faces) {
            const std::uint32_t ab = b.midpoint(f[0], f[1]);
            const std::uint32_t bc = b.midpoint(f[1], f[2]);
            const std::uint32_t ca = b.midpoint(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        b.faces.swap(next);
    }
    TriangleMesh mesh;
    mesh.positions.reserve(b.verts.size());
    for (const auto& v : b.verts) mesh.positions.push_back(v * radius);
    mesh.faces = std::move(b.faces);
    mesh.compute_face_normals();
    return mesh;
}

TriangleMesh make_bumpy_sphere(int subdivisions, double radius, double amplitude,
                               double frequency) {
    TriangleMesh mesh = make_icosphere(subdivisions, 1.0);
    for (auto& p : mesh.positions) {
        const double bump = 1.0 + amplitude * std::sin(frequency * p.x) *
                                      std::sin(frequency * p.y) * std::cos(frequency * p.z);
        p = p * (radius * bump);
    }
    mesh.compute_face_normals();
    return mesh;
}

double point_triangle_distance_squared(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return length_squared(p - a);

    const Vec3 bp = p - b;
    const double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return length_squared(p - b);

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double v = d1 / (d1 - d3);
        return length_squared(p - (a + ab * v));
    }

    const Vec3 cp = p - c;
    const double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return length_squared(p - c);

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double w = d2 / (d2 - d6);
        return length_squared(p - (a + ac * w));
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return length_squared(p - (b + (c - b) * w));
    }

    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    return length_squared(p - (a + ab * v + ac * w));
}

}  // namespace sst
