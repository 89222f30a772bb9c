// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#include "sst/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace sst {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2*pi)

void check_dim(std::size_t got, std::size_t want, const char* what) {
    if (got != want) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}
}  // namespace

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.bias.size();
    return n;
}

void Mlp::quantize_f32() {
    for (auto& l : layers) {
        for (auto& w : l.weights) w = static_cast<double>(static_cast<float>(w));
        for (auto& b : l.bias) b = static_cast<double>(static_cast<float>(b));
    }
}

Mlp make_mlp(std::uint32_t input_dim, std::uint32_t output_dim, std::uint32_t depth,
             std::uint32_t width, RandomStream& rng) {
    if (input_dim == 0 || output_dim == 0) throw std::invalid_argument("make_mlp: zero dimension");
    Mlp mlp;
    std::uint32_t in = input_dim;
    for (std::uint32_t d = 0; d <= depth; ++d) {
        const std::uint32_t out = (d == depth) ? output_dim : width;
        DenseLayer layer;
        layer.in_dim = in;
        layer.out_dim = out;
        layer.weights.resize(static_cast<std::size_t>(in) * out);
        layer.bias.assign(out, 0.0);
        const double bound = std::sqrt(6.0 / (static_cast<double>(in) + out));
        for (auto& w : layer.weights) w = rng.uniform(-bound, bound);
        mlp.layers.push_back(std::move(layer));
        in = out;
    }
    return mlp;
}

Mlp make_gaussian_mlp(std::uint32_t input_dim, std::uint32_t p_out, std::uint32_t depth,
                      std::uint32_t width, RandomStream& rng, double logvar_bias) {
    Mlp mlp = make_mlp(input_dim, 2 * p_out, depth, width, rng);
    auto& head = mlp.layers.back();
    for (std::uint32_t i = p_out; i < 2 * p_out; ++i) head.bias[i] = logvar_bias;
    return mlp;
}

double softplus(double x) {
    return std::fmax(x, 0.0) + std::log1p(std::exp(-std::fabs(x)));
}

double softplus_derivative(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void mlp_forward(const Mlp& mlp, std::span<const double> input, std::vector<double>& output) {
    check_dim(input.size(), mlp.input_dim(), "mlp_forward input");
    std::vector<double> cur(input.begin(), input.end());
    std::vector<double> next;
    const std::size_t last = mlp.layers.size() - 1;
    for (std::size_t li = 0; li < mlp.layers.size(); ++li) {
        const DenseLayer& l = mlp.layers[li];
        next.assign(l.out_dim, 0.0);
        for (std::uint32_t r = 0; r < l.out_dim; ++r) {
            double acc = l.bias[r];
            const double* wrow = &l.weights[static_cast<std::size_t>(r) * l.in_dim];
            for (std::uint32_t c = 0; c < l.in_dim; ++c) acc += wrow[c] * cur[c];
            next[r] = (li == last) ? acc : softplus(acc);
        }
        cur.swap(next);
    }
    output = std::move(cur);
}

GaussianHead mlp_forward_gaussian(const Mlp& mlp, std::span<const double> input) {
    std::vector<double> out;
    mlp_forward(mlp, input, out);
    if (out.size() % 2 != 0) throw std::logic_error("gaussian head requires even output dim");
    const std::size_t p = out.size() / 2;
    GaussianHead head;
    head.mu.assign(out.begin(), out.begin() + p);
    head.log_var.assign(out.begin() + p, out.end());
    return head;
}

void mlp_forward_trace(const Mlp& mlp, std::span<const double> input, ForwardTrace& trace) {
    check_dim(input.size(), mlp.input_dim(), "mlp_forward_trace input");
    const std::size_t n = mlp.layers.size();
    trace.x.resize(n + 1);
    trace.pre.resize(n);
    trace.x[0].assign(input.begin(), input.end());
    for (std::size_t li = 0; li < n; ++li) {
        const DenseLayer& l = mlp.layers[li];
        auto& pre = trace.pre[li];
        auto& out = trace.x[li + 1];
        pre.assign(l.out_dim, 0.0);
        out.assign(l.out_dim, 0.0);
        const auto& in = trace.x[li];
        for (std::uint32_t r = 0; r < l.out_dim; ++r) {
            double acc = l.bias[r];
            const double* wrow = &l.weights[static_cast<std::size_t>(r) * l.in_dim];
            for (std::uint32_t c = 0; c < l.in_dim; ++c) acc += wrow[c] * in[c];
            pre[r] = acc;
            out[r] = (li + 1 == n) ? acc : softplus(acc);
        }
    }
}

void MlpGradients::match_shape(const Mlp& mlp) {
    layers.resize(mlp.layers.size());
    for (std::size_t i = 0; i < layers.size(); ++i) {
        layers[i].in_dim = mlp.layers[i].in_dim;
        layers[i].out_dim = mlp.layers[i].out_dim;
        layers[i].weights.assign(mlp.layers[i].weights.size(), 0.0);
        layers[i].bias.assign(mlp.layers[i].bias.size(), 0.0);
    }
}

void MlpGradients::set_zero() {
    for (auto& l : layers) {
        l.weights.assign(l.weights.size(), 0.0);
        l.bias.assign(l.bias.size(), 0.0);
    }
}

void MlpGradients::scale(double s) {
    for (auto& l : layers) {
        for (auto& w : l.weights) w *= s;
        for (auto& b : l.bias) b *= s;
    }
}

void mlp_backward(const Mlp& mlp, const ForwardTrace& trace, std::span<const double> upstream,
                  MlpGradients& accum, std::vector<double>* input_grad) {
    const std::size_t n = mlp.layers.size();
    check_dim(upstream.size(), mlp.output_dim(), "mlp_backward upstream");
    check_dim(accum.layers.size(), n, "mlp_backward gradient shape");

    std::vector<double> delta(upstream.begin(), upstream.end());
    std::vector<double> delta_prev;
    for (std::size_t li = n; li-- > 0;) {
        const DenseLayer& l = mlp.layers[li];
        DenseLayer& g = accum.layers[li];
        const auto& in = trace.x[li];

        // Hidden layers: fold the softplus derivative into delta.
        if (li + 1 != n) {
            const auto& pre = trace.pre[li];
            for (std::uint32_t r = 0; r < l.out_dim; ++r) delta[r] *= softplus_derivative(pre[r]);
        }

        for (std::uint32_t r = 0; r < l.out_dim; ++r) {
            g.bias[r] += delta[r];
            double* grow = &g.weights[static_cast<std::size_t>(r) * l.in_dim];
            for (std::uint32_t c = 0; c < l.in_dim; ++c) grow[c] += delta[r] * in[c];
        }

        if (li > 0 || input_grad) {
            delta_prev.assign(l.in_dim, 0.0);
            for (std::uint32_t r = 0; r < l.out_dim; ++r) {
                const double* wrow = &l.weights[static_cast<std::size_t>(r) * l.in_dim];
                for (std::uint32_t c = 0; c < l.in_dim; ++c) delta_prev[c] += wrow[c] * delta[r];
            }
            delta.swap(delta_prev);
        }
    }
    if (input_grad) *input_grad = std::move(delta);
}

double gaussian_kl(std::span<const double> mu, std::span<const double> log_var) {
    check_dim(log_var.size(), mu.size(), "gaussian_kl");
    double acc = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        acc += mu[i] * mu[i] + std::exp(log_var[i]) - 1.0 - log_var[i];
    return 0.5 * acc;
}

double gaussian_loglik(std::span<const double> x, std::span<const double> mu,
                       std::span<const double> log_var) {
    check_dim(mu.size(), x.size(), "gaussian_loglik");
    check_dim(log_var.size(), x.size(), "gaussian_loglik");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - mu[i];
        acc += -kHalfLog2Pi - 0.5 * log_var[i] - d * d / (2.0 * std::exp(log_var[i]));
    }
    return acc;
}

std::vector<double> reparameterize(std::span<const double> mu, std::span<const double> log_var,
                                   std::span<const double> eps) {
    check_dim(log_var.size(), mu.size(), "reparameterize");
    check_dim(eps.size(), mu.size(), "reparameterize");
    std::vector<double> out(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        out[i] = mu[i] + std::exp(0.5 * log_var[i]) * eps[i];
    return out;
}

void adamw_step(AdamWState& state, std::span<double> params, std::span<const double> grads) {
    check_dim(params.size(), state.m.size(), "adamw_step params");
    check_dim(grads.size(), state.m.size(), "adamw_step grads");
    const AdamWConfig& c = state.config;
    state.t += 1;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * grads[i];
        state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= c.lr * (m_hat / (std::sqrt(v_hat) + c.eps) + c.weight_decay * params[i]);
    }
}

std::vector<double> flatten_parameters(const Mlp& mlp) {
    std::vector<double> flat;
    flat.reserve(mlp.parameter_count());
    for (const auto& l : mlp.layers) {
        flat.insert(flat.end(), l.weights.begin(), l.weights.end());
        flat.insert(flat.end(), l.bias.begin(), l.bias.end());
    }
    return flat;
}

void unflatten_parameters(std::span<const double> flat, Mlp& mlp) {
    check_dim(flat.size(), mlp.parameter_count(), "unflatten_parameters");
    std::size_t off = 0;
    for (auto& l : mlp.layers) {
        std::copy(flat.begin() + off, flat.begin() + off + l.weights.size(), l.weights.begin());
        off += l.weights.size();
        std::copy(flat.begin() + off, flat.begin() + off + l.bias.size(), l.bias.begin());
        off += l.bias.size();
    }
}

std::vector<double> flatten_gradients(const MlpGradients& grads) {
    std::vector<double> flat;
    for (const auto& l : grads.layers) {
        flat.insert(flat.end(), l.weights.begin(), l.weights.end());
        flat.insert(flat.end(), l.bias.begin(), l.bias.end());
    }
    return flat;
}

}  // namespace sst
