// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#include "sst/optics.hpp"

#include <cmath>
#include <stdexcept>

namespace sst {

namespace {
constexpr double kInv4Pi = 0.07957747154594766788;
constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kIsotropicG = 1e-4;

void check_g(double g) {
    if (!(g > -1.0 && g < 1.0)) throw std::domain_error("HG anisotropy g must lie in (-1, 1)");
}
}  // namespace

void MediumParams::validate() const {
    if (!(sigma_t >= 0.0)) throw std::domain_error("sigma_t must be >= 0");
    check_g(g);
    if (!(phi >= 0.0 && phi <= 1.0)) throw std::domain_error("albedo phi must lie in [0, 1]");
}

double hg_eval(double g, double cos_angle) {
    check_g(g);
    const double denom = 1.0 + g * g - 2.0 * g * cos_angle;
    return kInv4Pi * (1.0 - g * g) / (denom * std::sqrt(denom));
}

double hg_sample_cos(double g, double u) {
    check_g(g);
    if (std::fabs(g) < kIsotropicG) return 1.0 - 2.0 * u;
    const double s = (1.0 - g * g) / (1.0 + g - 2.0 * g * u);
    double c = (1.0 + g * g - s * s) / (2.0 * g);
    return c < -1.0 ? -1.0 : (c > 1.0 ? 1.0 : c);
}

Vec3 hg_sample(double g, const Vec3& w_in, double u1, double u2) {
    const double cos_theta = hg_sample_cos(g, u1);
    const double sin_theta = std::sqrt(std::fmax(0.0, 1.0 - cos_theta * cos_theta));
    const double phi = kTwoPi * u2;
    Vec3 b1, b2;
    orthonormal_basis(w_in, b1, b2);
    return b1 * (sin_theta * std::cos(phi)) + b2 * (sin_theta * std::sin(phi)) + w_in * cos_theta;
}

double transmittance(double sigma_t, double distance) {
    if (!(distance >= 0.0)) throw std::domain_error("transmittance distance must be >= 0");
    return std::exp(-sigma_t * distance);
}

double sample_free_path(double sigma_t, double xi) {
    if (!(sigma_t > 0.0))
        throw std::domain_error("sample_free_path requires sigma_t > 0 (vacuum handled by caller)");
    if (!(xi >= 0.0 && xi < 1.0)) throw std::domain_error("free-path variate must lie in [0, 1)");
    return -std::log1p(-xi) / sigma_t;
}

double absorption_prob(std::uint64_t n_events, double phi) {
    if (!(phi >= 0.0 && phi <= 1.0)) throw std::domain_error("albedo phi must lie in [0, 1]");
    if (n_events == 0 || phi >= 1.0) return 0.0;
    if (phi <= 0.0) return 1.0;
    return -std::expm1(static_cast<double>(n_events) * std::log(phi));
}

double representative_weight_sum(std::uint64_t n_events, double phi) {
    if (n_events == 0 || phi <= 0.0) return 0.0;
    if (phi >= 1.0) return static_cast<double>(n_events);
    // Geometric series phi(1 - phi^n) / (1 - phi).
    const double phi_n = std::exp(static_cast<double>(n_events) * std::log(phi));
    return phi * (1.0 - phi_n) / (1.0 - phi);
}

}  // namespace sst
