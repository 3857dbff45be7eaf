#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "logdef/tensor.hpp"
#include "logdef/tokenizer.hpp"

namespace logdef {

// Frozen text-side surface of a backbone: its tokenizer and raw
// input-embedding table. This is all the embedding store needs to see.
class TextAdapter {
  public:
    virtual ~TextAdapter() = default;
    virtual Tokenizer& tokenizer() = 0;
    virtual int64_t embed_dim() const = 0;
    virtual std::vector<double> table_row(int64_t token_id) const = 0;
    virtual std::string backbone_id() const = 0;
};

struct EmbeddingMeta {
    std::string init_description;
    int64_t training_steps = 0;
    double guidance_scale_used = 0.0;
    std::string created_from_backbone_id;

    bool operator==(const EmbeddingMeta&) const = default;
};

// The only trainable parameter: one row per placeholder token, living in the
// backbone's input-embedding space.
struct LogicalEmbedding {
    Tensor rows; // [n_tokens, d]
    EmbeddingMeta meta;

    int64_t n_tokens() const { return rows.shape.empty() ? 0 : rows.shape[0]; }
    int64_t dim() const { return rows.shape.size() < 2 ? 0 : rows.shape[1]; }
};

// Rows are the input-embedding-table vectors of the first n_tokens content
// tokens of the description; shorter descriptions cycle from the start.
LogicalEmbedding initialize_from_description(const std::string& description, int64_t n_tokens, TextAdapter& adapter);

// Fixed binary format: "LGDF" magic, version, n_tokens, d, float width,
// row-major little-endian payload, a 32-byte integrity digest, then a
// length-prefixed UTF-8 metadata block. Round-trips are bit-exact.
void save_embedding(const LogicalEmbedding& e, const std::string& path);
LogicalEmbedding load_embedding(const std::string& path);

// Throws ShapeError naming both dimensions when the embedding cannot be
// attached to a backbone with the given embedding width.
void ensure_dim_compatible(const LogicalEmbedding& e, int64_t backbone_dim, const std::string& backbone_id);

} // namespace logdef
