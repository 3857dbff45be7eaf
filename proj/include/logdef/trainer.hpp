#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "logdef/backend.hpp"
#include "logdef/embedding.hpp"
#include "logdef/prompts.hpp"
#include "logdef/rng.hpp"

namespace logdef {

struct TrainConfig {
    double learning_rate = 0.0005;
    int64_t batch_size = 4;
    int64_t max_steps = 3000;
    double omega = 3.0;
    int64_t n_tokens = 6;
    int64_t seed = 0;
    PromptPreset prompt_preset = PromptPreset::P3;
    bool negative_path = true;
    int64_t checkpoint_every = 500;

    void validate() const;
};

struct AdamState {
    Tensor m;
    Tensor v;
    int64_t steps = 0;
};

struct TrainState {
    int64_t step = 0;
    LogicalEmbedding embedding;
    AdamState opt;
    std::vector<double> loss_history;
    Rng rng{0};
};

// Joint positive/negative prompt-tuning loop. The backbone stays frozen;
// gradient flows through both branches of the combined estimate into the
// embedding rows, and one optimizer update per step touches only those rows.
class Trainer {
  public:
    Trainer(DiffusionBackend& backend, std::vector<Tensor> dataset_images, TrainConfig cfg,
            std::vector<ContextualTemplate> templates = {});

    struct DrawnSample {
        int64_t data_index = 0;
        int64_t template_index = 0;
        int64_t t = 1;
        Tensor eps;
    };
    using DrawnBatch = std::vector<DrawnSample>;

    // Per-sample draw order is fixed: data index, template index, timestep,
    // then the noise tensor. Both prompt branches of a sample share its draw.
    DrawnBatch draw_batch(Rng& rng) const;

    // Pure loss of the combined objective at fixed draws (used by the
    // finite-difference gradient checks). Mean over samples of the squared
    // L2 norm of (combined - eps).
    double loss_for_batch(const LogicalEmbedding& embedding, const DrawnBatch& batch);

    // Loss plus gradient w.r.t. the embedding rows, one batched traced call
    // over the concatenated positive and negative conditionings.
    std::pair<double, Tensor> loss_and_grad(const LogicalEmbedding& embedding, const DrawnBatch& batch);

    TrainState init_state(LogicalEmbedding embedding) const;

    // Draw, evaluate, update. Returns the recorded loss.
    double training_step(TrainState& state);

    // Runs to cfg.max_steps, checkpointing every checkpoint_every steps when
    // out_dir is set, and writes a run manifest alongside. Aborts on
    // non-finite loss or a backbone digest change.
    LogicalEmbedding train(TrainState& state, const std::optional<std::string>& out_dir = std::nullopt);

    const TrainConfig& config() const { return cfg_; }
    const std::vector<ContextualTemplate>& templates() const { return templates_; }
    const std::string& initial_digest() const { return initial_digest_; }

    static void save_checkpoint(const TrainState& state, const std::string& dir, const TrainConfig& cfg,
                                const std::string& backbone_id);
    static TrainState load_checkpoint(const std::string& embedding_path);

  private:
    void write_manifest(const TrainState& state, const std::string& dir) const;
    const PromptTriple& triple_for(int64_t template_index);

    DiffusionBackend& backend_;
    TrainConfig cfg_;
    std::vector<ContextualTemplate> templates_;
    std::vector<Tensor> latents_;
    std::vector<std::optional<PromptTriple>> triples_;
    std::string initial_digest_;
};

} // namespace logdef
