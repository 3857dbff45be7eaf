#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "logdef/embedding.hpp"
#include "logdef/prompts.hpp"
#include "logdef/rng.hpp"
#include "logdef/schedule.hpp"
#include "logdef/tensor.hpp"

namespace logdef {

// One forward-diffusion sample: z_t = alpha_t * z_0 + sigma_t * eps.
struct NoisedLatent {
    Tensor z_t;
    int64_t t = 0;
    Tensor eps;
    double alpha_t = 1.0;
    double sigma_t = 0.0;
};

// Text conditioning after splicing the trainable rows into the placeholder
// positions. Rows outside the span come from the frozen embedding table.
struct Conditioning {
    std::vector<int64_t> token_ids;
    Tensor embedded; // [seq, d]
    TokenSpan span;  // placeholder positions; length 0 means no trainable rows

    bool has_placeholder() const { return span.length() > 0; }
};

// Uniform surface over a diffusion backbone: schedule math, autoencoder,
// text conditioning and the denoiser. Implementations: the analytic toy
// backend and the latent-diffusion checkpoint adapter.
class DiffusionBackend {
  public:
    virtual ~DiffusionBackend() = default;

    virtual std::string backbone_id() const = 0;

    // Digest over every frozen parameter; must be bit-stable across training.
    virtual std::string parameter_digest() const = 0;

    virtual const NoiseSchedule& schedule() const = 0;
    virtual std::vector<int64_t> latent_shape() const = 0;
    virtual TextAdapter& text_adapter() = 0;

    // Deterministic encoder (stochastic compressors are resolved to their mean).
    virtual Tensor encode_image(const Tensor& image) = 0;
    virtual Tensor decode_latent(const Tensor& z) = 0;

    // Pure schedule math shared by both implementations; accepts t in [0, T]
    // where t = 0 is the identity point.
    NoisedLatent add_noise(const Tensor& z, const Tensor& eps, int64_t t) const;

    // Positive/negative conditioning for a built triple with the shared
    // trainable embedding spliced at the span. Validates that the triple's
    // token ids still match the tokenizer (stale spans are an error).
    virtual std::pair<Conditioning, Conditioning> encode_text(const PromptTriple& triple,
                                                              const LogicalEmbedding& embedding) = 0;

    // Conditioning for a plain prompt without placeholder (baseline or the
    // empty prompt used as the guidance reference).
    virtual Conditioning encode_plain_text(const std::string& text) = 0;

    // Batched noise prediction, no gradients. Output i is shaped like z_t[i].
    virtual std::vector<Tensor> predict_noise(const std::vector<Tensor>& z_t, const std::vector<int64_t>& t,
                                              const std::vector<Conditioning>& cond) = 0;

    // Differentiable batched prediction for the trainer. backward() maps
    // per-sample upstream gradients to a gradient on the embedding rows;
    // only conditioning rows inside a span receive gradient.
    struct TracedPrediction {
        std::vector<Tensor> eps;
        std::function<Tensor(const std::vector<Tensor>&)> backward;
    };
    virtual TracedPrediction predict_noise_traced(const std::vector<Tensor>& z_t, const std::vector<int64_t>& t,
                                                  const std::vector<Conditioning>& cond,
                                                  const LogicalEmbedding& embedding) = 0;
};

// Standard-normal tensor from the deterministic rng, in row-major order.
Tensor randn(const std::vector<int64_t>& shape, Rng& rng);

// Builds conditioning rows from token ids: frozen table rows everywhere,
// trainable embedding rows inside the span. embedding may be null only when
// the span is empty.
Conditioning splice_conditioning(const std::vector<int64_t>& ids, TokenSpan span, const LogicalEmbedding* embedding,
                                 TextAdapter& adapter);

} // namespace logdef
