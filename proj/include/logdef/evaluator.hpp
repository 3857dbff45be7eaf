#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "logdef/tensor.hpp"

namespace logdef {

// Image/text encoder pair into a shared space. Injected so scoring logic is
// testable on synthetic embeddings without any model download.
class EncoderPair {
  public:
    virtual ~EncoderPair() = default;
    virtual std::vector<double> embed_image(const Tensor& image) = 0;
    virtual std::vector<double> embed_text(const std::string& prompt) = 0;
    virtual int64_t dim() const = 0;
};

struct EvalRecord {
    std::string category;
    std::string prompt;
    std::vector<double> per_image; // 100 x cosine, or raw cosine when requested
    double mean = 0.0;
};

// Cosine between two embeddings; exact 1.0 for identical vectors.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// Scores every image against the prompt. Scores are 100 x cosine by default
// (raw_cosine drops the scale factor).
EvalRecord clip_t(const std::vector<Tensor>& images, const std::string& prompt, EncoderPair& encoder,
                  bool raw_cosine = false);

struct MethodScores {
    std::string method;
    std::vector<EvalRecord> records; // category order must match across methods
};

// Markdown table: rows = methods, columns = categories + mean, two decimals,
// best value per column in bold.
std::string eval_table_markdown(const std::vector<MethodScores>& methods);

// Long-format CSV: method, category, n_images, mean_clip_t.
std::string eval_table_csv(const std::vector<MethodScores>& methods);

// Deterministic linear encoder pair loaded from a JSON file: bag-of-words
// text vectors plus a linear projection over a pooled pixel grid. See the
// README for the schema.
std::unique_ptr<EncoderPair> load_file_encoder(const std::string& path);

// The fixed evaluation prompt, with {fruits} substituted by the category.
std::string eval_prompt_for_category(const std::string& category);

} // namespace logdef
