#pragma once

#include <memory>
#include <string>

#include "logdef/backend.hpp"
#include "logdef/toy_world.hpp"
#include "logdef/tokenizer.hpp"

namespace logdef {

// Diffusion backend over the analytic toy world.
//
// Conditioning model: the pooled trainable rows form a 2-vector whose inner
// products with the two mode means are softmax-gated into a linear selection
// between the two conditional score fields. A prompt carrying "not" shifts
// the anti-rule logit by a fixed bias, which is the frozen-prior analogue of
// the negation token; prompts without a placeholder fall back to the exact
// unconditional mixture field.
class ToyBackend final : public DiffusionBackend, public TextAdapter {
  public:
    // Frozen logit bias applied to the anti-rule field for negated prompts.
    static constexpr double kNegationBias = 0.25;
    // Scale of the deterministic pseudo-random embedding table rows.
    static constexpr double kTableScale = 0.05;

    ToyBackend() : world_(ToyWorld::standard()) {}
    explicit ToyBackend(ToyWorld world) : world_(std::move(world)) {}

    const ToyWorld& world() const { return world_; }

    // DiffusionBackend
    std::string backbone_id() const override { return "toy-gm2-v1"; }
    std::string parameter_digest() const override;
    const NoiseSchedule& schedule() const override { return world_.schedule; }
    std::vector<int64_t> latent_shape() const override { return {2}; }
    TextAdapter& text_adapter() override { return *this; }

    Tensor encode_image(const Tensor& image) override;
    Tensor decode_latent(const Tensor& z) override;

    std::pair<Conditioning, Conditioning> encode_text(const PromptTriple& triple,
                                                      const LogicalEmbedding& embedding) override;
    Conditioning encode_plain_text(const std::string& text) override;

    std::vector<Tensor> predict_noise(const std::vector<Tensor>& z_t, const std::vector<int64_t>& t,
                                      const std::vector<Conditioning>& cond) override;
    TracedPrediction predict_noise_traced(const std::vector<Tensor>& z_t, const std::vector<int64_t>& t,
                                          const std::vector<Conditioning>& cond,
                                          const LogicalEmbedding& embedding) override;

    // TextAdapter
    Tokenizer& tokenizer() override { return tokenizer_; }
    int64_t embed_dim() const override { return 2; }
    std::vector<double> table_row(int64_t token_id) const override;

    // Softmax weight of the rule-conditional field for the given conditioning.
    double gate_weight(const Conditioning& c) const;

  private:
    struct GateInfo {
        double g = 0.5;              // weight on the rule-conditional field
        double pooled[2] = {0, 0};   // mean of the span rows
        bool negated = false;
    };
    GateInfo gate_info(const Conditioning& c) const;
    Tensor forward_one(const Tensor& z_t, int64_t t, const Conditioning& c) const;

    ToyWorld world_;
    WordTokenizer tokenizer_{75};
};

} // namespace logdef
