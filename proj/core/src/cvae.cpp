// Copyright (c) 2026 sstrace contributors
// SPDX-License-Identifier: Apache-2.0

#include "sst/cvae.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "sst/serialize.hpp"

namespace sst {

namespace {

constexpr char kMagic[4] = {'S', 'S', 'N', 'N'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr double kLogVarClamp = 10.0;

double clamp_log_var(double lv) { return std::fmin(kLogVarClamp, std::fmax(-kLogVarClamp, lv)); }
bool log_var_clamped(double lv) { return std::fabs(lv) >= kLogVarClamp; }

std::vector<double> concat(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::kLength: return "lengthgen";
        case ModelKind::kPath: return "pathgen";
        case ModelKind::kEvent: return "eventgen";
    }
    return "unknown";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "lengthgen" || name == "length") return ModelKind::kLength;
    if (name == "pathgen" || name == "path") return ModelKind::kPath;
    if (name == "eventgen" || name == "event") return ModelKind::kEvent;
    throw std::invalid_argument("unknown model kind: " + name);
}

CvaeSpec CvaeSpec::production_default(ModelKind kind) {
    switch (kind) {
        case ModelKind::kLength: return {2, 1, 2, 8, 2};
        case ModelKind::kPath: return {3, 3, 2, 16, 5};
        case ModelKind::kEvent: return {7, 6, 2, 16, 5};
    }
    throw std::logic_error("unknown model kind");
}

void CvaeSpec::validate() const {
    if (p_in == 0 || p_out == 0 || width == 0 || latent == 0)
        throw std::invalid_argument("CvaeSpec: zero dimension");
    if ((p_in + latent) % 4 != 0)
        throw std::invalid_argument("CvaeSpec: p_in + latent must be a multiple of four");
}

double NormConstants::normalize_sigma(double sigma_scaled) const {
    return std::log1p(std::fmax(0.0, sigma_scaled)) / std::log1p(sigma_ref);
}

double NormConstants::normalize_n(double n) const {
    return std::log(std::fmax(1.0, n)) / std::log(n_ref);
}

double NormConstants::denormalize_n(double n_tilde) const {
    return std::exp(n_tilde * std::log(n_ref));
}

CvaeModel make_cvae(ModelKind kind, const CvaeSpec& spec, std::uint64_t seed) {
    spec.validate();
    CvaeModel m;
    m.kind = kind;
    m.spec = spec;
    RandomStream rng(seed, stream_salt::kTrainInit, static_cast<std::uint64_t>(kind));
    m.encoder = make_gaussian_mlp(spec.p_out + spec.p_in, spec.latent, spec.depth, spec.width, rng);
    m.decoder = make_gaussian_mlp(spec.latent + spec.p_in, spec.p_out, spec.depth, spec.width, rng);
    m.encoder.quantize_f32();
    m.decoder.quantize_f32();
    m.has_encoder = true;
    return m;
}

GaussianHead cvae_decode(const CvaeModel& model, std::span<const double> z,
                         std::span<const double> c) {
    GaussianHead head = mlp_forward_gaussian(model.decoder, concat(z, c));
    for (auto& lv : head.log_var) lv = clamp_log_var(lv);
    return head;
}

std::vector<double> cvae_decode_sample(const CvaeModel& model, std::span<const double> z,
                                       std::span<const double> c, std::span<const double> eps) {
    const GaussianHead head = cvae_decode(model, z, c);
    return reparameterize(head.mu, head.log_var, eps);
}

namespace {

struct ElboForward {
    ForwardTrace enc_trace;
    ForwardTrace dec_trace;
    std::vector<double> mu_e, lv_e;  // clamped
    std::vector<double> mu_d, lv_d;  // clamped
    std::vector<double> z;
    double loss = 0.0;
};

ElboForward elbo_forward(const CvaeModel& model, std::span<const double> x,
                         std::span<const double> c, std::span<const double> eps_z) {
    if (!model.has_encoder) throw std::logic_error("elbo requires an encoder");
    const std::uint32_t latent = model.spec.latent;
    if (x.size() != model.spec.p_out || c.size() != model.spec.p_in ||
        eps_z.size() != latent)
        throw std::invalid_argument("elbo: shape mismatch");

    ElboForward f;
    mlp_forward_trace(model.encoder, concat(x, c), f.enc_trace);
    const auto& enc_out = f.enc_trace.x.back();
    f.mu_e.assign(enc_out.begin(), enc_out.begin() + latent);
    f.lv_e.assign(enc_out.begin() + latent, enc_out.end());
    for (auto& lv : f.lv_e) lv = clamp_log_var(lv);

    f.z = reparameterize(f.mu_e, f.lv_e, eps_z);

    mlp_forward_trace(model.decoder, concat(f.z, c), f.dec_trace);
    const auto& dec_out = f.dec_trace.x.back();
    const std::uint32_t p = model.spec.p_out;
    f.mu_d.assign(dec_out.begin(), dec_out.begin() + p);
    f.lv_d.assign(dec_out.begin() + p, dec_out.end());
    for (auto& lv : f.lv_d) lv = clamp_log_var(lv);

    f.loss = gaussian_kl(f.mu_e, f.lv_e) - gaussian_loglik(x, f.mu_d, f.lv_d);
    return f;
}

}  // namespace

double cvae_elbo_loss(const CvaeModel& model, std::span<const double> x, std::span<const double> c,
                      std::span<const double> eps_z) {
    return elbo_forward(model, x, c, eps_z).loss;
}

double cvae_elbo_loss_grad(const CvaeModel& model, std::span<const double> x,
                           std::span<const double> c, std::span<const double> eps_z,
                           MlpGradients& encoder_grads, MlpGradients& decoder_grads) {
    ElboForward f = elbo_forward(model, x, c, eps_z);
    const std::uint32_t p = model.spec.p_out;
    const std::uint32_t latent = model.spec.latent;

    // d(-loglik)/d(mu_d, lv_d); clamped log-variances contribute no gradient.
    std::vector<double> dec_upstream(2 * p);
    for (std::uint32_t i = 0; i < p; ++i) {
        const double inv_var = std::exp(-f.lv_d[i]);
        const double d = x[i] - f.mu_d[i];
        dec_upstream[i] = -d * inv_var;
        dec_upstream[p + i] =
            log_var_clamped(f.lv_d[i]) ? 0.0 : 0.5 - 0.5 * d * d * inv_var;
    }

    std::vector<double> dec_input_grad;
    mlp_backward(model.decoder, f.dec_trace, dec_upstream, decoder_grads, &dec_input_grad);

    // Chain through z = mu_e + exp(lv_e / 2) * eps, plus the KL term.
    std::vector<double> enc_upstream(2 * latent);
    for (std::uint32_t i = 0; i < latent; ++i) {
        const double dz = dec_input_grad[i];
        enc_upstream[i] = f.mu_e[i] + dz;
        const double dlv_kl = 0.5 * (std::exp(f.lv_e[i]) - 1.0);
        const double dlv_rep = dz * 0.5 * std::exp(0.5 * f.lv_e[i]) * eps_z[i];
        enc_upstream[latent + i] = log_var_clamped(f.lv_e[i]) ? 0.0 : dlv_kl + dlv_rep;
    }
    mlp_backward(model.encoder, f.enc_trace, enc_upstream, encoder_grads, nullptr);
    return f.loss;
}

std::vector<double> condition_length(const NormConstants& n, double sigma_scaled, double g) {
    return {n.normalize_sigma(sigma_scaled), g};
}

std::vector<double> condition_path(const NormConstants& n, double sigma_scaled, double g,
                                   double n_events) {
    return {n.normalize_sigma(sigma_scaled), g, n.normalize_n(n_events)};
}

std::vector<double> condition_event(const NormConstants& n, double sigma_scaled, double g,
                                    double phi, double cos_theta, double alpha, double beta,
                                    double n_events) {
    return {n.normalize_sigma(sigma_scaled), g, phi, cos_theta, alpha, beta,
            n.normalize_n(n_events)};
}

std::vector<double> condition_for_sample(ModelKind kind, const NormConstants& n,
                                         const TrainingSample& s) {
    switch (kind) {
        case ModelKind::kLength: return condition_length(n, s.sigma_t, s.g);
        case ModelKind::kPath: return condition_path(n, s.sigma_t, s.g, s.n_events);
        case ModelKind::kEvent:
            return condition_event(n, s.sigma_t, s.g, s.phi, s.cos_theta, s.alpha, s.beta,
                                   s.n_events);
    }
    throw std::logic_error("unknown model kind");
}

std::vector<double> target_for_sample(ModelKind kind, const NormConstants& n,
                                      const TrainingSample& s) {
    switch (kind) {
        case ModelKind::kLength: return {n.normalize_n(s.n_events)};
        case ModelKind::kPath: return {s.cos_theta, s.alpha, s.beta};
        case ModelKind::kEvent:
            return {s.rep_position[0], s.rep_position[1], s.rep_position[2],
                    s.rep_direction[0], s.rep_direction[1], s.rep_direction[2]};
    }
    throw std::logic_error("unknown model kind");
}

void TrainConfig::validate() const {
    if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be > 0");
    if (batch_size == 0) throw std::invalid_argument("TrainConfig: batch_size must be > 0");
    if (epochs == 0) throw std::invalid_argument("TrainConfig: epochs must be > 0");
    if (!(weight_decay >= 0.0)) throw std::invalid_argument("TrainConfig: negative weight decay");
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
        throw std::invalid_argument("TrainConfig: validation fraction out of range");
}

TrainResult train_model(ModelKind kind, const Dataset& dataset, const TrainConfig& config) {
    config.validate();
    if (dataset.samples.empty()) throw std::invalid_argument("train_model: empty dataset");

    CvaeSpec spec = CvaeSpec::production_default(kind);
    if (config.depth > 0) spec.depth = static_cast<std::uint32_t>(config.depth);
    if (config.width > 0) spec.width = static_cast<std::uint32_t>(config.width);
    if (config.latent > 0) spec.latent = static_cast<std::uint32_t>(config.latent);

    TrainResult result;
    result.model = make_cvae(kind, spec, config.seed);
    CvaeModel& model = result.model;
    model.dataset_fingerprint = dataset.fingerprint();

    const NormConstants& norms = model.norms;
    const std::size_t n_total = dataset.samples.size();

    // Pre-extract targets and conditions once.
    std::vector<std::vector<double>> targets(n_total), conditions(n_total);
    for (std::size_t i = 0; i < n_total; ++i) {
        targets[i] = target_for_sample(kind, norms, dataset.samples[i]);
        conditions[i] = condition_for_sample(kind, norms, dataset.samples[i]);
    }

    // Seed-fixed validation split.
    std::vector<std::uint32_t> order(n_total);
    std::iota(order.begin(), order.end(), 0u);
    {
        RandomStream split_rng(config.seed, stream_salt::kTrainSplit);
        for (std::size_t i = n_total; i > 1; --i)
            std::swap(order[i - 1], order[static_cast<std::size_t>(split_rng.uniform() * i)]);
    }
    const auto n_val =
        static_cast<std::size_t>(config.validation_fraction * static_cast<double>(n_total));
    std::vector<std::uint32_t> val_idx(order.begin(), order.begin() + n_val);
    std::vector<std::uint32_t> train_idx(order.begin() + n_val, order.end());
    if (train_idx.empty()) throw std::invalid_argument("train_model: no training samples left");

    AdamWConfig opt_cfg;
    opt_cfg.lr = config.lr;
    opt_cfg.weight_decay = config.weight_decay;
    AdamWState enc_state(model.encoder.parameter_count(), opt_cfg);
    AdamWState dec_state(model.decoder.parameter_count(), opt_cfg);

    MlpGradients enc_grads, dec_grads;
    enc_grads.match_shape(model.encoder);
    dec_grads.match_shape(model.decoder);

    std::vector<double> eps(spec.latent);
    result.epochs.reserve(config.epochs);

    for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        RandomStream shuffle_rng(config.seed, stream_salt::kTrainShuffle, epoch);
        for (std::size_t i = train_idx.size(); i > 1; --i)
            std::swap(train_idx[i - 1], train_idx[static_cast<std::size_t>(shuffle_rng.uniform() * i)]);

        double epoch_loss = 0.0;
        std::size_t epoch_samples = 0;
        std::size_t finite_batches = 0, total_batches = 0;

        for (std::size_t start = 0; start < train_idx.size(); start += config.batch_size) {
            const std::size_t end = std::min(train_idx.size(), start + config.batch_size);
            enc_grads.set_zero();
            dec_grads.set_zero();
            double batch_loss = 0.0;
            for (std::size_t b = start; b < end; ++b) {
                const std::uint32_t i = train_idx[b];
                RandomStream eps_rng(config.seed, stream_salt::kTrainLatent, epoch, i);
                for (auto& e : eps) e = eps_rng.normal();
                batch_loss += cvae_elbo_loss_grad(model, targets[i], conditions[i], eps, enc_grads,
                                                  dec_grads);
            }
            ++total_batches;
            const double inv = 1.0 / static_cast<double>(end - start);
            if (!std::isfinite(batch_loss)) continue;  // step rejected
            ++finite_batches;
            epoch_loss += batch_loss;
            epoch_samples += end - start;
            enc_grads.scale(inv);
            dec_grads.scale(inv);

            auto enc_flat = flatten_parameters(model.encoder);
            auto dec_flat = flatten_parameters(model.decoder);
            auto enc_g = flatten_gradients(enc_grads);
            auto dec_g = flatten_gradients(dec_grads);
            adamw_step(enc_state, enc_flat, enc_g);
            adamw_step(dec_state, dec_flat, dec_g);
            unflatten_parameters(enc_flat, model.encoder);
            unflatten_parameters(dec_flat, model.decoder);
        }

        if (finite_batches == 0)
            throw std::runtime_error(std::string("train_model(") + model_kind_name(kind) +
                                     "): diverged, every batch non-finite in epoch " +
                                     std::to_string(epoch));

        EpochStats stats;
        stats.train_loss = epoch_loss / static_cast<double>(std::max<std::size_t>(1, epoch_samples));

        double val_loss = 0.0;
        for (const std::uint32_t i : val_idx) {
            RandomStream eps_rng(config.seed, stream_salt::kTrainLatent, epoch, i);
            for (auto& e : eps) e = eps_rng.normal();
            val_loss += cvae_elbo_loss(model, targets[i], conditions[i], eps);
        }
        stats.validation_loss =
            val_idx.empty() ? stats.train_loss : val_loss / static_cast<double>(val_idx.size());
        result.epochs.push_back(stats);
    }

    model.encoder.quantize_f32();
    model.decoder.quantize_f32();
    return result;
}

void save_model(const std::string& path, const CvaeModel& model, bool include_encoder) {
    BinaryWriter w(path);
    w.magic(kMagic);
    w.u32(kFormatVersion);
    w.u32(static_cast<std::uint32_t>(model.kind));
    const bool with_encoder = include_encoder && model.has_encoder;
    w.u32(with_encoder ? 1u : 0u);
    w.u32(model.spec.p_in);
    w.u32(model.spec.p_out);
    w.u32(model.spec.depth);
    w.u32(model.spec.width);
    w.u32(model.spec.latent);
    w.f64(model.norms.sigma_ref);
    w.f64(model.norms.n_ref);
    w.u64(model.dataset_fingerprint);

    auto write_mlp = [&w](const Mlp& mlp) {
        w.u32(static_cast<std::uint32_t>(mlp.layers.size()));
        for (const auto& l : mlp.layers) {
            w.u32(l.out_dim);
            w.u32(l.in_dim);
            for (const double v : l.weights) w.f32(static_cast<float>(v));
            for (const double v : l.bias) w.f32(static_cast<float>(v));
        }
    };
    write_mlp(model.decoder);
    if (with_encoder) write_mlp(model.encoder);
    w.close();
}

CvaeModel load_model(const std::string& path) {
    BinaryReader r(path);
    r.expect_magic(kMagic, "model " + path);
    const std::uint32_t version = r.u32();
    if (version != kFormatVersion)
        throw std::runtime_error("model " + path + ": unsupported version " +
                                 std::to_string(version));
    CvaeModel m;
    m.kind = static_cast<ModelKind>(r.u32());
    const bool with_encoder = r.u32() != 0;
    m.spec.p_in = r.u32();
    m.spec.p_out = r.u32();
    m.spec.depth = r.u32();
    m.spec.width = r.u32();
    m.spec.latent = r.u32();
    m.norms.sigma_ref = r.f64();
    m.norms.n_ref = r.f64();
    m.dataset_fingerprint = r.u64();

    auto read_mlp = [&r, &path]() {
        Mlp mlp;
        const std::uint32_t n_layers = r.u32();
        if (n_layers == 0 || n_layers > 64)
            throw std::runtime_error("model " + path + ": implausible layer count");
        mlp.layers.resize(n_layers);
        for (auto& l : mlp.layers) {
            l.out_dim = r.u32();
            l.in_dim = r.u32();
            if (l.out_dim == 0 || l.in_dim == 0 || l.out_dim > 4096 || l.in_dim > 4096)
                throw std::runtime_error("model " + path + ": implausible layer shape");
            l.weights.resize(static_cast<std::size_t>(l.out_dim) * l.in_dim);
            l.bias.resize(l.out_dim);
            for (auto& v : l.weights) v = r.f32();
            for (auto& v : l.bias) v = r.f32();
        }
        return mlp;
    };
    m.decoder = read_mlp();
    if (with_encoder) m.encoder = read_mlp();
    m.has_encoder = with_encoder;
    r.require_ok("model " + path);

    if (m.decoder.input_dim() != m.spec.latent + m.spec.p_in ||
        m.decoder.output_dim() != 2 * m.spec.p_out)
        throw std::runtime_error("model " + path + ": decoder shape disagrees with header");
    return m;
}

void save_model_text(const std::string& path, const CvaeModel& model) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    std::fprintf(f, "kind %s\n", model_kind_name(model.kind));
    std::fprintf(f, "p_in %u\np_out %u\ndepth %u\nwidth %u\nlatent %u\n", model.spec.p_in,
                 model.spec.p_out, model.spec.depth, model.spec.width, model.spec.latent);
    std::fprintf(f, "sigma_ref %.17g\nn_ref %.17g\n", model.norms.sigma_ref, model.norms.n_ref);
    std::fprintf(f, "dataset_fingerprint %016llx\n",
                 static_cast<unsigned long long>(model.dataset_fingerprint));
    auto dump = [f](const char* name, const Mlp& mlp) {
        std::fprintf(f, "%s layers %zu\n", name, mlp.layers.size());
        for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
            const auto& l = mlp.layers[i];
            std::fprintf(f, "layer %zu %u x %u\n", i, l.out_dim, l.in_dim);
            for (std::uint32_t r = 0; r < l.out_dim; ++r) {
                std::fprintf(f, "w");
                for (std::uint32_t c = 0; c < l.in_dim; ++c)
                    std::fprintf(f, " %.9g", l.weights[static_cast<std::size_t>(r) * l.in_dim + c]);
                std::fprintf(f, "\n");
            }
            std::fprintf(f, "b");
            for (const double b : l.bias) std::fprintf(f, " %.9g", b);
            std::fprintf(f, "\n");
        }
    };
    dump("decoder", model.decoder);
    if (model.has_encoder) dump("encoder", model.encoder);
    if (std::fclose(f) != 0) throw std::runtime_error("write failure: " + path);
}

}  // namespace sst
