// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sst/dataset.hpp"
#include "sst/mlp.hpp"

namespace sst {

/// The three generative models of the factorized sphere-step sampler.
enum class ModelKind : std::uint32_t {
    kLength = 0,  // number of scattering events N | (sigma_t, g)
    kPath = 1,    // exit parameters (cos_theta, alpha, beta) | (sigma_t, g, N)
    kEvent = 2,   // representative event (X, W) | (sigma_t, g, phi, exit, N)
};

const char* model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

/// Architecture of one encoder/decoder pair. Defaults follow the selected
/// production settings; depth/width/latent can be overridden within the
/// examined grid as long as p_in + latent stays a multiple of four (the
/// decoder input alignment rule).
struct CvaeSpec {
    std::uint32_t p_in = 0;
    std::uint32_t p_out = 0;
    std::uint32_t depth = 2;
    std::uint32_t width = 8;
    std::uint32_t latent = 2;

    static CvaeSpec production_default(ModelKind kind);
    void validate() const;
};

/// Normalization applied to conditioning/target variables. sigma_t maps via
/// log(1 + sigma) / log(1 + sigma_ref) to [0, 1] over the training range;
/// event counts train in log space, log(N) / log(n_ref).
struct NormConstants {
    double sigma_ref = 200.0;
    double n_ref = 1e4;

    double normalize_sigma(double sigma_scaled) const;
    double normalize_n(double n) const;
    double denormalize_n(double n_tilde) const;
};

struct CvaeModel {
    ModelKind kind = ModelKind::kLength;
    CvaeSpec spec;
    NormConstants norms;
    Mlp encoder;  // input p_out + p_in -> 2 * latent
    Mlp decoder;  // input latent + p_in -> 2 * p_out
    bool has_encoder = false;
    std::uint64_t dataset_fingerprint = 0;
};

/// Fresh model with seeded initialization (weights quantized through f32 so
/// that training starts from a serializable state).
CvaeModel make_cvae(ModelKind kind, const CvaeSpec& spec, std::uint64_t seed);

/// Decoder-side Gaussian head for latent z and condition c, log-variance
/// clamped to [-10, 10].
GaussianHead cvae_decode(const CvaeModel& model, std::span<const double> z,
                         std::span<const double> c);

/// One decoded data-space sample: mu_Dec + sqrt(Sigma_Dec) * eps.
std::vector<double> cvae_decode_sample(const CvaeModel& model, std::span<const double> z,
                                       std::span<const double> c, std::span<const double> eps);

/// Negative evidence lower bound for one sample (loss to minimize):
/// KL(q_Enc(z|x,c) || N(0,I)) - log p_Dec(x|z,c) with z reparameterized
/// through eps_z. Requires the encoder.
double cvae_elbo_loss(const CvaeModel& model, std::span<const double> x, std::span<const double> c,
                      std::span<const double> eps_z);

/// Loss plus exact parameter gradients, accumulated into the given gradient
/// holders (shapes must match encoder/decoder).
double cvae_elbo_loss_grad(const CvaeModel& model, std::span<const double> x,
                           std::span<const double> c, std::span<const double> eps_z,
                           MlpGradients& encoder_grads, MlpGradients& decoder_grads);

/// Conditioning vectors (inference side; training builds identical ones).
std::vector<double> condition_length(const NormConstants& n, double sigma_scaled, double g);
std::vector<double> condition_path(const NormConstants& n, double sigma_scaled, double g,
                                   double n_events);
std::vector<double> condition_event(const NormConstants& n, double sigma_scaled, double g,
                                    double phi, double cos_theta, double alpha, double beta,
                                    double n_events);

/// Training-side views of one dataset record.
std::vector<double> condition_for_sample(ModelKind kind, const NormConstants& n,
                                         const TrainingSample& s);
std::vector<double> target_for_sample(ModelKind kind, const NormConstants& n,
                                      const TrainingSample& s);

struct TrainConfig {
    double lr = 1e-3;
    std::uint32_t batch_size = 512;
    std::uint32_t epochs = 100;
    double weight_decay = 1e-4;
    std::uint64_t seed = 1;
    double validation_fraction = 0.05;
    // <= 0 keeps the production default for the model kind.
    int depth = -1;
    int width = -1;
    int latent = -1;

    void validate() const;
};

struct EpochStats {
    double train_loss = 0.0;
    double validation_loss = 0.0;
};

struct TrainResult {
    CvaeModel model;
    std::vector<EpochStats> epochs;
};

/// Minibatch AdamW minimization of the ELBO loss. Deterministic under
/// config.seed (single-threaded ordered reduction). Throws on divergence
/// (every batch of an epoch non-finite).
TrainResult train_model(ModelKind kind, const Dataset& dataset, const TrainConfig& config);

/// Versioned binary bundle ("SSNN"): architecture, normalization constants,
/// dataset fingerprint, decoder layers, optional encoder layers (f32).
void save_model(const std::string& path, const CvaeModel& model, bool include_encoder = true);
CvaeModel load_model(const std::string& path);

/// Human-readable dump mirroring the binary layout.
void save_model_text(const std::string& path, const CvaeModel& model);

}  // namespace sst
