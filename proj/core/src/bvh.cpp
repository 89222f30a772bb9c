// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#include "sst/bvh.hpp"

#include <algorithm>
#include <cmath>

namespace sst {

std::optional<double> ray_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c,
                                   double t_min) {
    const Vec3 e1 = b - a, e2 = c - a;
    const Vec3 pvec = cross(ray.direction, e2);
    const double det = dot(e1, pvec);
    if (std::fabs(det) < 1e-14) return std::nullopt;
    const double inv_det = 1.0 / det;
    const Vec3 tvec = ray.origin - a;
    const double u = dot(tvec, pvec) * inv_det;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 qvec = cross(tvec, e1);
    const double v = dot(ray.direction, qvec) * inv_det;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    const double t = dot(e2, qvec) * inv_det;
    if (t <= t_min || t >= ray.t_max) return std::nullopt;
    return t;
}

Bvh::Bvh(const TriangleMesh& mesh) : mesh_(&mesh) {
    const auto n = static_cast<std::uint32_t>(mesh.triangle_count());
    order_.resize(n);
    centroids_.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        order_[i] = i;
        centroids_[i] = (mesh.vertex(i, 0) + mesh.vertex(i, 1) + mesh.vertex(i, 2)) / 3.0;
    }
    nodes_.reserve(2 * n);
    build(0, n);
    centroids_.clear();
    centroids_.shrink_to_fit();
}

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end) {
    const auto node_index = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();

    Vec3 lo(1e300, 1e300, 1e300), hi(-1e300, -1e300, -1e300);
    Vec3 clo = lo, chi = hi;
    for (std::uint32_t i = begin; i < end; ++i) {
        const std::uint32_t tri = order_[i];
        for (int k = 0; k < 3; ++k) {
            lo = min(lo, mesh_->vertex(tri, k));
            hi = max(hi, mesh_->vertex(tri, k));
        }
        clo = min(clo, centroids_[tri]);
        chi = max(chi, centroids_[tri]);
    }
    nodes_[node_index].lo = lo;
    nodes_[node_index].hi = hi;

    const std::uint32_t count = end - begin;
    if (count <= 4) {
        nodes_[node_index].first = begin;
        nodes_[node_index].count = count;
        return node_index;
    }

    const Vec3 extent = chi - clo;
    int axis = 0;
    if (extent.y > extent.x) axis = 1;
    if (extent.z > extent[axis]) axis = 2;
    const double split = 0.5 * (clo[axis] + chi[axis]);

    auto* mid_it = std::partition(order_.begin() + begin, order_.begin() + end,
                                  [&](std::uint32_t tri) { return centroids_[tri][axis] < split; });
    auto mid = static_cast<std::uint32_t>(mid_it - order_.begin());
    if (mid == begin || mid == end) mid = begin + count / 2;  // degenerate spread

    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    nodes_[node_index].left = left;
    nodes_[node_index].first = right;  // interior nodes keep the right child here
    nodes_[node_index].count = 0;
    return node_index;
}

namespace {
bool slab_hit(const Vec3& lo, const Vec3& hi, const Ray& ray, double t_min, double t_best) {
    double t0 = t_min, t1 = t_best;
    for (int a = 0; a < 3; ++a) {
        const double inv = 1.0 / (a == 0 ? ray.direction.x : a == 1 ? ray.direction.y : ray.direction.z);
        const double o = a == 0 ? ray.origin.x : a == 1 ? ray.origin.y : ray.origin.z;
        double near = ((a == 0 ? lo.x : a == 1 ? lo.y : lo.z) - o) * inv;
        double far = ((a == 0 ? hi.x : a == 1 ? hi.y : hi.z) - o) * inv;
        if (near > far) std::swap(near, far);
        t0 = std::fmax(t0, near);
        t1 = std::fmin(t1, far);
        if (t0 > t1) return false;
    }
    return true;
}

double box_distance_squared(const Vec3& lo, const Vec3& hi, const Vec3& p) {
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) {
        const double v = p[a];
        const double l = lo[a], h = hi[a];
        if (v < l) d2 += (l - v) * (l - v);
        else if (v > h) d2 += (v - h) * (v - h);
    }
    return d2;
}
}  // namespace

std::optional<Hit> Bvh::intersect(const Ray& ray, double t_min) const {
    std::optional<Hit> best;
    double t_best = ray.t_max;
    std::uint32_t stack[64];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& node = nodes_[stack[--sp]];
        if (!slab_hit(node.lo, node.hi, ray, t_min, t_best)) continue;
        if (node.count > 0) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                const std::uint32_t tri = order_[i];
                Ray clipped = ray;
                clipped.t_max = t_best;
                if (const auto t = ray_triangle(clipped, mesh_->vertex(tri, 0),
                                                mesh_->vertex(tri, 1), mesh_->vertex(tri, 2), t_min)) {
                    t_best = *t;
                    Hit h;
                    h.t = *t;
                    h.triangle = tri;
                    h.geometric_normal = mesh_->face_normals[tri];
                    h.shading_normal = dot(h.geometric_normal, ray.direction) < 0.0
                                           ? h.geometric_normal
                                           : -h.geometric_normal;
                    best = h;
                }
            }
        } else {
            stack[sp++] = node.left;
            stack[sp++] = node.first;
        }
    }
    return best;
}

void Bvh::intersect_all(const Ray& ray, std::vector<Hit>& hits, double t_min) const {
    hits.clear();
    std::uint32_t stack[64];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& node = nodes_[stack[--sp]];
        if (!slab_hit(node.lo, node.hi, ray, t_min, ray.t_max)) continue;
        if (node.count > 0) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                const std::uint32_t tri = order_[i];
                if (const auto t = ray_triangle(ray, mesh_->vertex(tri, 0), mesh_->vertex(tri, 1),
                                                mesh_->vertex(tri, 2), t_min)) {
                    Hit h;
                    h.t = *t;
                    h.triangle = tri;
                    h.geometric_normal = mesh_->face_normals[tri];
                    h.shading_normal = dot(h.geometric_normal, ray.direction) < 0.0
                                           ? h.geometric_normal
                                           : -h.geometric_normal;
                    hits.push_back(h);
                }
            }
        } else {
            stack[sp++] = node.left;
            stack[sp++] = node.first;
        }
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.t < b.t; });
}

double Bvh::distance(const Vec3& point) const {
    double best2 = 1e300;
    std::uint32_t stack[64];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& node = nodes_[stack[--sp]];
        if (box_distance_squared(node.lo, node.hi, point) >= best2) continue;
        if (node.count > 0) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                const std::uint32_t tri = order_[i];
                best2 = std::fmin(best2, point_triangle_distance_squared(
                                              point, mesh_->vertex(tri, 0), mesh_->vertex(tri, 1),
                                              mesh_->vertex(tri, 2)));
            }
        } else {
            stack[sp++] = node.left;
            stack[sp++] = node.first;
        }
    }
    return std::sqrt(best2);
}

bool Bvh::inside(const Vec3& point) const {
    // Fixed, slightly irrational directions to dodge edge-aligned rays.
    static const Vec3 dirs[3] = {normalize(Vec3(0.5380, 0.1123, 0.8354)),
                                 normalize(Vec3(-0.8312, 0.3052, 0.4643)),
                                 normalize(Vec3(0.1710, -0.9364, 0.3063))};
    std::vector<Hit> hits;
    int votes = 0;
    for (const auto& d : dirs) {
        Ray ray{point, d, 1e300};
        intersect_all(ray, hits);
        if (hits.size() % 2 == 1) ++votes;
    }
    return votes >= 2;
}

double winding_number(const TriangleMesh& mesh, const Vec3& point) {
    // Sum of signed solid angles over all triangles / 4 pi.
    double total = 0.0;
    for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
        const Vec3 a = mesh.vertex(i, 0) - point;
        const Vec3 b = mesh.vertex(i, 1) - point;
        const Vec3 c = mesh.vertex(i, 2) - point;
        const double la = length(a), lb = length(b), lc = length(c);
        const double num = dot(a, cross(b, c));
        const double den = la * lb * lc + dot(a, b) * lc + dot(b, c) * la + dot(c, a) * lb;
        total += 2.0 * std::atan2(num, den);
    }
    return total / (4.0 * 3.14159265358979323846);
}

}  // namespace sst
