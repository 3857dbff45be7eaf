#include "logdef/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "logdef/errors.hpp"
#include "logdef/kernels.hpp"

namespace logdef {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

std::string checkpoint_stem(int64_t step) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "ckpt_step%06lld", static_cast<long long>(step));
    return buf;
}

nlohmann::ordered_json config_json(const TrainConfig& c) {
    nlohmann::ordered_json j;
    j["learning_rate"] = c.learning_rate;
    j["batch_size"] = c.batch_size;
    j["max_steps"] = c.max_steps;
    j["omega"] = c.omega;
    j["n_tokens"] = c.n_tokens;
    j["seed"] = c.seed;
    j["prompt_preset"] = prompt_preset_name(c.prompt_preset);
    j["negative_path"] = c.negative_path;
    j["checkpoint_every"] = c.checkpoint_every;
    return j;
}

} // namespace

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw Error("learning_rate must be positive");
    if (batch_size < 1) throw Error("batch_size must be positive");
    if (max_steps < 0) throw Error("max_steps must be non-negative");
    if (!(omega >= 0.0) || !std::isfinite(omega)) throw Error("omega must be finite and non-negative");
    if (n_tokens < 1) throw Error("n_tokens must be positive");
    if (checkpoint_every < 1) throw Error("checkpoint_every must be positive");
}

Trainer::Trainer(DiffusionBackend& backend, std::vector<Tensor> dataset_images, TrainConfig cfg,
                 std::vector<ContextualTemplate> templates)
    : backend_(backend), cfg_(std::move(cfg)) {
    cfg_.validate();
    if (dataset_images.empty()) throw Error("trainer: dataset is empty");
    templates_ = templates.empty() ? preset_templates(cfg_.prompt_preset) : std::move(templates);
    for (const ContextualTemplate& t : templates_) validate_template(t);
    triples_.resize(templates_.size());

    latents_.reserve(dataset_images.size());
    for (const Tensor& img : dataset_images) {
        latents_.push_back(backend_.encode_image(img));
    }
    initial_digest_ = backend_.parameter_digest();
}

const PromptTriple& Trainer::triple_for(int64_t template_index) {
    auto& slot = triples_[static_cast<size_t>(template_index)];
    if (!slot.has_value()) {
        slot = build_prompt_triple(templates_[static_cast<size_t>(template_index)], LogicalSuffix{}, cfg_.n_tokens,
                                   backend_.text_adapter().tokenizer());
    }
    return *slot;
}

Trainer::DrawnBatch Trainer::draw_batch(Rng& rng) const {
    DrawnBatch batch;
    batch.reserve(static_cast<size_t>(cfg_.batch_size));
    const std::vector<int64_t> shape = backend_.latent_shape();
    for (int64_t i = 0; i < cfg_.batch_size; ++i) {
        DrawnSample s;
        s.data_index = rng.uniform_int(0, static_cast<int64_t>(latents_.size()) - 1);
        s.template_index = rng.uniform_int(0, static_cast<int64_t>(templates_.size()) - 1);
        s.t = rng.uniform_int(1, backend_.schedule().steps());
        s.eps = randn(shape, rng);
        batch.push_back(std::move(s));
    }
    return batch;
}

std::pair<double, Tensor> Trainer::loss_and_grad(const LogicalEmbedding& embedding, const DrawnBatch& batch) {
    const size_t B = batch.size();
    if (B == 0) throw Error("empty batch");

    std::vector<Tensor> z_list;
    std::vector<int64_t> t_list;
    std::vector<Conditioning> cond_list;
    z_list.reserve(2 * B);
    t_list.reserve(2 * B);
    cond_list.reserve(2 * B);

    std::vector<Conditioning> neg_conds;
    neg_conds.reserve(B);
    for (const DrawnSample& s : batch) {
        const PromptTriple& triple = triple_for(s.template_index);
        auto [pos, neg] = backend_.encode_text(triple, embedding);
        const NoisedLatent noised =
            backend_.add_noise(latents_[static_cast<size_t>(s.data_index)], s.eps, s.t);
        z_list.push_back(noised.z_t);
        t_list.push_back(s.t);
        cond_list.push_back(std::move(pos));
        neg_conds.push_back(std::move(neg));
    }
    if (cfg_.negative_path) {
        // Both branches ride in a single batched call.
        for (size_t i = 0; i < B; ++i) {
            z_list.push_back(z_list[i]);
            t_list.push_back(t_list[i]);
            cond_list.push_back(std::move(neg_conds[i]));
        }
    }

    auto traced = backend_.predict_noise_traced(z_list, t_list, cond_list, embedding);

    const double omega = cfg_.negative_path ? cfg_.omega : 0.0;
    double loss = 0.0;
    std::vector<Tensor> upstream(traced.eps.size());
    for (size_t i = 0; i < B; ++i) {
        const Tensor& eps_pos = traced.eps[i];
        const Tensor* eps_neg = cfg_.negative_path ? &traced.eps[B + i] : &eps_pos;
        Tensor combined(eps_pos.shape);
        kernels::guided_combine(eps_pos.data.data(), eps_neg->data.data(), omega, combined.data.data(),
                                combined.numel());

        const Tensor& target = batch[i].eps;
        Tensor residual(combined.shape);
        double sample_loss = 0.0;
        for (int64_t k = 0; k < combined.numel(); ++k) {
            residual[k] = combined[k] - target[k];
            sample_loss += residual[k] * residual[k];
        }
        loss += sample_loss;

        // d loss / d combined = 2 residual / B, then chain into the branches.
        Tensor up_pos(residual.shape);
        for (int64_t k = 0; k < residual.numel(); ++k) {
            up_pos[k] = (1.0 + omega) * 2.0 * residual[k] / double(B);
        }
        upstream[i] = std::move(up_pos);
        if (cfg_.negative_path) {
            Tensor up_neg(residual.shape);
            for (int64_t k = 0; k < residual.numel(); ++k) {
                up_neg[k] = -omega * 2.0 * residual[k] / double(B);
            }
            upstream[B + i] = std::move(up_neg);
        }
    }
    loss /= double(B);

    Tensor grad = traced.backward(upstream);
    return {loss, std::move(grad)};
}

double Trainer::loss_for_batch(const LogicalEmbedding& embedding, const DrawnBatch& batch) {
    const size_t B = batch.size();
    if (B == 0) throw Error("empty batch");

    std::vector<Tensor> z_list;
    std::vector<int64_t> t_list;
    std::vector<Conditioning> cond_list;
    std::vector<Conditioning> neg_conds;
    for (const DrawnSample& s : batch) {
        const PromptTriple& triple = triple_for(s.template_index);
        auto [pos, neg] = backend_.encode_text(triple, embedding);
        const NoisedLatent noised =
            backend_.add_noise(latents_[static_cast<size_t>(s.data_index)], s.eps, s.t);
        z_list.push_back(noised.z_t);
        t_list.push_back(s.t);
        cond_list.push_back(std::move(pos));
        neg_conds.push_back(std::move(neg));
    }
    if (cfg_.negative_path) {
        for (size_t i = 0; i < B; ++i) {
            z_list.push_back(z_list[i]);
            t_list.push_back(t_list[i]);
            cond_list.push_back(std::move(neg_conds[i]));
        }
    }

    const std::vector<Tensor> eps_hat = backend_.predict_noise(z_list, t_list, cond_list);
    const double omega = cfg_.negative_path ? cfg_.omega : 0.0;
    double loss = 0.0;
    for (size_t i = 0; i < B; ++i) {
        const Tensor& eps_pos = eps_hat[i];
        const Tensor* eps_neg = cfg_.negative_path ? &eps_hat[B + i] : &eps_pos;
        Tensor combined(eps_pos.shape);
        kernels::guided_combine(eps_pos.data.data(), eps_neg->data.data(), omega, combined.data.data(),
                                combined.numel());
        double sample_loss = 0.0;
        for (int64_t k = 0; k < combined.numel(); ++k) {
            const double r = combined[k] - batch[i].eps[k];
            sample_loss += r * r;
        }
        loss += sample_loss;
    }
    return loss / double(B);
}

TrainState Trainer::init_state(LogicalEmbedding embedding) const {
    ensure_dim_compatible(embedding, backend_.text_adapter().embed_dim(), backend_.backbone_id());
    if (embedding.n_tokens() != cfg_.n_tokens) {
        throw ShapeError("embedding has " + std::to_string(embedding.n_tokens()) + " rows, config expects " +
                         std::to_string(cfg_.n_tokens));
    }
    TrainState state;
    state.embedding = std::move(embedding);
    state.opt.m = Tensor(state.embedding.rows.shape);
    state.opt.v = Tensor(state.embedding.rows.shape);
    state.rng = Rng(static_cast<uint64_t>(cfg_.seed));
    return state;
}

double Trainer::training_step(TrainState& state) {
    const DrawnBatch batch = draw_batch(state.rng);
    auto [loss, grad] = loss_and_grad(state.embedding, batch);
    if (!std::isfinite(loss)) {
        throw Error("non-finite loss at step " + std::to_string(state.step + 1));
    }

    // Adam on the embedding rows only; no weight decay, no schedule.
    AdamState& opt = state.opt;
    opt.steps += 1;
    const double bc1 = 1.0 - std::pow(kAdamBeta1, double(opt.steps));
    const double bc2 = 1.0 - std::pow(kAdamBeta2, double(opt.steps));
    Tensor& rows = state.embedding.rows;
    for (int64_t i = 0; i < rows.numel(); ++i) {
        opt.m[i] = kAdamBeta1 * opt.m[i] + (1.0 - kAdamBeta1) * grad[i];
        opt.v[i] = kAdamBeta2 * opt.v[i] + (1.0 - kAdamBeta2) * grad[i] * grad[i];
        const double mhat = opt.m[i] / bc1;
        const double vhat = opt.v[i] / bc2;
        rows[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + kAdamEps);
    }

    state.step += 1;
    state.loss_history.push_back(loss);
    return loss;
}

LogicalEmbedding Trainer::train(TrainState& state, const std::optional<std::string>& out_dir) {
    if (out_dir) std::filesystem::create_directories(*out_dir);

    while (state.step < cfg_.max_steps) {
        training_step(state);
        if (out_dir && state.step % cfg_.checkpoint_every == 0 && state.step < cfg_.max_steps) {
            if (backend_.parameter_digest() != initial_digest_) {
                throw Error("backbone parameters changed during training (digest mismatch at step " +
                            std::to_string(state.step) + ")");
            }
            save_checkpoint(state, *out_dir, cfg_, backend_.backbone_id());
        }
    }

    if (backend_.parameter_digest() != initial_digest_) {
        throw Error("backbone parameters changed during training (digest mismatch at end)");
    }

    state.embedding.meta.training_steps = state.step;
    state.embedding.meta.guidance_scale_used = cfg_.negative_path ? cfg_.omega : 0.0;
    state.embedding.meta.created_from_backbone_id = backend_.backbone_id();

    if (out_dir) {
        save_checkpoint(state, *out_dir, cfg_, backend_.backbone_id());
        write_manifest(state, *out_dir);
    }
    return state.embedding;
}

void Trainer::save_checkpoint(const TrainState& state, const std::string& dir, const TrainConfig& cfg,
                              const std::string& backbone_id) {
    const std::string stem = dir + "/" + checkpoint_stem(state.step);
    LogicalEmbedding snapshot = state.embedding;
    snapshot.meta.training_steps = state.step;
    snapshot.meta.guidance_scale_used = cfg.negative_path ? cfg.omega : 0.0;
    snapshot.meta.created_from_backbone_id = backbone_id;
    save_embedding(snapshot, stem + ".lgdf");

    nlohmann::ordered_json j;
    j["step"] = state.step;
    j["adam_m"] = state.opt.m.data;
    j["adam_v"] = state.opt.v.data;
    j["adam_steps"] = state.opt.steps;
    j["rng_state"] = state.rng.state();
    j["loss_history"] = state.loss_history;
    std::ofstream out(stem + ".state.json", std::ios::trunc);
    if (!out) throw Error("cannot write checkpoint state: " + stem + ".state.json");
    out << j.dump(2) << "\n";
}

TrainState Trainer::load_checkpoint(const std::string& embedding_path) {
    TrainState state;
    state.embedding = load_embedding(embedding_path);

    std::string state_path = embedding_path;
    const std::string suffix = ".lgdf";
    if (state_path.size() > suffix.size() && state_path.ends_with(suffix)) {
        state_path.resize(state_path.size() - suffix.size());
    }
    state_path += ".state.json";

    std::ifstream in(state_path);
    if (!in) throw Error("cannot open checkpoint state: " + state_path);
    const auto j = nlohmann::json::parse(in);
    state.step = j.at("step").get<int64_t>();
    state.opt.m = Tensor(state.embedding.rows.shape, j.at("adam_m").get<std::vector<double>>());
    state.opt.v = Tensor(state.embedding.rows.shape, j.at("adam_v").get<std::vector<double>>());
    state.opt.steps = j.at("adam_steps").get<int64_t>();
    state.rng.set_state(j.at("rng_state").get<std::string>());
    state.loss_history = j.at("loss_history").get<std::vector<double>>();
    return state;
}

void Trainer::write_manifest(const TrainState& state, const std::string& dir) const {
    nlohmann::ordered_json j;
    j["backbone_id"] = backend_.backbone_id();
    j["backbone_digest"] = initial_digest_;
    j["config"] = config_json(cfg_);
    j["n_templates"] = templates_.size();
    j["dataset_size"] = latents_.size();
    j["loss_reduction"] = "per-sample mean of the squared L2 norm";
    j["timestep_sampling"] = "uniform over {1..T}";
    j["loss_history"] = state.loss_history;
    std::ofstream out(dir + "/run_manifest.json", std::ios::trunc);
    if (!out) throw Error("cannot write run manifest in " + dir);
    out << j.dump(2) << "\n";
}

} // namespace logdef
