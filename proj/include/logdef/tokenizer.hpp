#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace logdef {

// Tokenizer surface shared by every backbone adapter. Pseudo tokens
// (the expanded placeholder literals) are registered as atomic units and
// carry negative ids so they can never collide with vocabulary ids.
class Tokenizer {
  public:
    virtual ~Tokenizer() = default;

    virtual std::vector<int64_t> encode(const std::string& text) const = 0;

    // Usable prompt budget in tokens (special tokens already subtracted).
    virtual int64_t max_tokens() const = 0;

    // Get-or-create an atomic token for a placeholder literal like "[V_3]".
    virtual int64_t register_pseudo_token(const std::string& literal) = 0;

    static bool is_pseudo(int64_t id) { return id < 0; }
};

// Whitespace tokenizer with an open hashed vocabulary. Used by the toy
// backend and in prompt unit tests. Trailing/leading ASCII punctuation is
// peeled into separate tokens so placeholder literals stay atomic even when
// a template glues a period onto them.
class WordTokenizer final : public Tokenizer {
  public:
    explicit WordTokenizer(int64_t budget = 75) : budget_(budget) {}

    std::vector<int64_t> encode(const std::string& text) const override;
    int64_t max_tokens() const override { return budget_; }
    int64_t register_pseudo_token(const std::string& literal) override;

    // Stable id for a plain word (FNV-1a, masked non-negative).
    static int64_t word_id(const std::string& word);

  private:
    int64_t budget_;
    std::unordered_map<std::string, int64_t> pseudo_;
};

// Splits text into word pieces the way WordTokenizer does, before hashing.
std::vector<std::string> split_words(const std::string& text);

} // namespace logdef
