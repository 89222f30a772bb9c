// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sst/rng.hpp"

namespace sst {

/// Dense affine layer y = W x + b, weights row-major [out_dim x in_dim].
/// Values are held in doubles; serialization quantizes through 32-bit floats
/// and trained models are quantized the same way so that a save/load round
/// trip reproduces inference bit-exactly.
struct DenseLayer {
    std::uint32_t out_dim = 0;
    std::uint32_t in_dim = 0;
    std::vector<double> weights;  // out_dim * in_dim
    std::vector<double> bias;     // out_dim
};

/// Multi-layer perceptron: `depth` hidden layers of width `width` with
/// softplus activation, identity on the final layer.
struct Mlp {
    std::vector<DenseLayer> layers;

    std::uint32_t input_dim() const { return layers.front().in_dim; }
    std::uint32_t output_dim() const { return layers.back().out_dim; }
    std::size_t parameter_count() const;

    /// Rounds every weight and bias through float precision.
    void quantize_f32();
};

/// Uniform +-sqrt(6 / (fan_in + fan_out)) initialization. A Gaussian head
/// (mean, log-variance) is produced by make_gaussian_mlp, which also biases
/// the log-variance outputs to logvar_bias so early posteriors start tight.
Mlp make_mlp(std::uint32_t input_dim, std::uint32_t output_dim, std::uint32_t depth,
             std::uint32_t width, RandomStream& rng);
Mlp make_gaussian_mlp(std::uint32_t input_dim, std::uint32_t p_out, std::uint32_t depth,
                      std::uint32_t width, RandomStream& rng, double logvar_bias = -2.0);

/// Overflow-safe softplus log(1 + exp(x)) and its derivative (the logistic
/// sigmoid).
double softplus(double x);
double softplus_derivative(double x);

void mlp_forward(const Mlp& mlp, std::span<const double> input, std::vector<double>& output);

/// Forward pass splitting the output into (mu, log_var) halves.
struct GaussianHead {
    std::vector<double> mu;
    std::vector<double> log_var;
};
GaussianHead mlp_forward_gaussian(const Mlp& mlp, std::span<const double> input);

/// Cached activations for the backward pass. x[0] is the input, x[i] the
/// post-activation output of layer i-1; pre[i] the pre-activation of layer i.
struct ForwardTrace {
    std::vector<std::vector<double>> x;
    std::vector<std::vector<double>> pre;
};
void mlp_forward_trace(const Mlp& mlp, std::span<const double> input, ForwardTrace& trace);

/// Parameter gradients, shaped like the layers they belong to.
struct MlpGradients {
    std::vector<DenseLayer> layers;

    void match_shape(const Mlp& mlp);
    void set_zero();
    void scale(double s);
};

/// Exact reverse-mode gradients of sum(upstream . output) w.r.t. all weights
/// and biases (accumulated into `accum`) and the input (written to
/// `input_grad` when non-null).
void mlp_backward(const Mlp& mlp, const ForwardTrace& trace, std::span<const double> upstream,
                  MlpGradients& accum, std::vector<double>* input_grad = nullptr);

/// 0.5 * sum(mu^2 + exp(lv) - 1 - lv): KL of a diagonal Gaussian from the
/// standard normal.
double gaussian_kl(std::span<const double> mu, std::span<const double> log_var);

/// Diagonal Gaussian log density of x under N(mu, exp(log_var)).
double gaussian_loglik(std::span<const double> x, std::span<const double> mu,
                       std::span<const double> log_var);

/// mu + exp(log_var / 2) * eps.
std::vector<double> reparameterize(std::span<const double> mu, std::span<const double> log_var,
                                   std::span<const double> eps);

struct AdamWConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 1e-4;
};

/// Per-parameter moments for AdamW with decoupled weight decay.
struct AdamWState {
    AdamWConfig config;
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;

    explicit AdamWState(std::size_t n = 0, AdamWConfig cfg = {})
        : config(cfg), m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected AdamW step: p -= lr * (m_hat / (sqrt(v_hat) + eps)
/// + weight_decay * p).
void adamw_step(AdamWState& state, std::span<double> params, std::span<const double> grads);

/// Flattened parameter/gradient views used to drive one optimizer across a
/// whole network (weights then bias, layer by layer).
std::vector<double> flatten_parameters(const Mlp& mlp);
void unflatten_parameters(std::span<const double> flat, Mlp& mlp);
std::vector<double> flatten_gradients(const MlpGradients& grads);

}  // namespace sst
