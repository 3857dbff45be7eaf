#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "logdef/rng.hpp"
#include "logdef/tokenizer.hpp"

namespace logdef {

// A scene-describing template with exactly one "{rule}" slot where the
// logical suffix is spliced.
struct ContextualTemplate {
    std::string text;
};

// The rule-carrying suffix and its negation. The two strings differ only by
// the leading "not ", and each contains the placeholder exactly once.
struct LogicalSuffix {
    std::string positive = "with the rule of [V]";
    std::string negative = "not with the rule of [V]";
};

struct TokenSpan {
    int64_t begin = 0; // first placeholder position
    int64_t end = 0;   // one past the last
    int64_t length() const { return end - begin; }
};

// A fully rendered positive/negative prompt pair with resolved placeholder
// token spans, tied to the tokenizer that produced them.
struct PromptTriple {
    ContextualTemplate contextual;
    std::string positive_text;
    std::string negative_text;
    std::vector<int64_t> positive_ids;
    std::vector<int64_t> negative_ids;
    TokenSpan positive_span;
    TokenSpan negative_span;
    int64_t n_tokens = 0;
};

enum class PromptPreset { P1, P2, P3 };

PromptPreset parse_prompt_preset(const std::string& name); // "p1" | "p2" | "p3"
std::string prompt_preset_name(PromptPreset p);

// Replaces the single "[V]" with n distinct literals "[V_1] ... [V_n]".
// Re-expansion is an error: an already expanded string has no "[V]" left.
std::string expand_placeholder(const std::string& text, int64_t n_tokens);

// The literal token sequence produced by expansion, e.g. {"[V_1]", "[V_2]"}.
std::vector<std::string> placeholder_literals(int64_t n_tokens);

// Splices the (unexpanded) suffix into the template's {rule} slot.
std::string render_with_suffix(const ContextualTemplate& tmpl, const std::string& suffix_text);

// Builds both prompt texts, tokenizes them, and resolves placeholder spans.
// Throws TokenBudgetError when the expansion exceeds tokenizer.max_tokens().
PromptTriple build_prompt_triple(const ContextualTemplate& tmpl, const LogicalSuffix& suffix, int64_t n_tokens,
                                 Tokenizer& tokenizer);

// Uniform draw from a non-empty template set; deterministic under the rng.
const ContextualTemplate& sample_contextual(const std::vector<ContextualTemplate>& set, Rng& rng);

// One template per line, UTF-8, '#'-prefixed comment lines and blank lines
// ignored. Every template is validated for the single {rule} slot.
std::vector<ContextualTemplate> load_template_file(const std::string& path);

// The built-in default template set (18 entries) and the named presets.
const std::vector<ContextualTemplate>& default_templates();
std::vector<ContextualTemplate> preset_templates(PromptPreset preset);

void validate_template(const ContextualTemplate& tmpl);
void validate_suffix(const LogicalSuffix& suffix);

} // namespace logdef
