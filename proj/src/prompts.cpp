#include "logdef/prompts.hpp"

#include <algorithm>
#include <fstream>

#include "logdef/errors.hpp"

namespace logdef {

namespace {

constexpr const char* kPlaceholder = "[V]";
constexpr const char* kRuleSlot = "{rule}";

size_t count_occurrences(const std::string& text, const std::string& needle) {
    size_t n = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

std::string replace_once(const std::string& text, const std::string& needle, const std::string& with) {
    const size_t pos = text.find(needle);
    std::string out = text;
    out.replace(pos, needle.size(), with);
    return out;
}

const char* kDefaultTemplates[] = {
    "a photo of fruits on the tree {rule}.",
    "a rendering of fruits on the tree {rule}.",
    "a cropped photo of fruits on the tree {rule}.",
    "the photo of fruits on the tree {rule}.",
    "a clean photo of fruits on the tree {rule}.",
    "a dirty photo of fruits on the tree {rule}.",
    "one photo of fruits on the tree {rule}.",
    "a cool photo of fruits on the tree {rule}.",
    "a close-up photo of fruits on the tree {rule}.",
    "a bright photo of fruits on the tree {rule}.",
    "one cropped photo of fruits on the tree {rule}.",
    "a good photo of fruits on the tree {rule}.",
    "one close-up photo of fruits on the tree {rule}.",
    "a rendition of fruits on the tree {rule}.",
    "a nice photo of fruits on the tree {rule}.",
    "a small photo of fruits on the tree {rule}.",
    "a weird photo of fruits on the tree {rule}.",
    "a large photo of fruits on the tree {rule}.",
};

} // namespace

PromptPreset parse_prompt_preset(const std::string& name) {
    if (name == "p1") return PromptPreset::P1;
    if (name == "p2") return PromptPreset::P2;
    if (name == "p3") return PromptPreset::P3;
    throw Error("unknown prompt preset '" + name + "' (expected p1, p2 or p3)");
}

std::string prompt_preset_name(PromptPreset p) {
    switch (p) {
        case PromptPreset::P1: return "p1";
        case PromptPreset::P2: return "p2";
        case PromptPreset::P3: return "p3";
    }
    return "p3";
}

void validate_template(const ContextualTemplate& tmpl) {
    const size_t slots = count_occurrences(tmpl.text, kRuleSlot);
    if (slots != 1) {
        throw Error("template must contain exactly one {rule} slot, found " + std::to_string(slots) + ": \"" +
                    tmpl.text + "\"");
    }
}

void validate_suffix(const LogicalSuffix& suffix) {
    if (suffix.negative != "not " + suffix.positive) {
        throw Error("negative suffix must be the positive suffix with a leading \"not \"");
    }
    if (count_occurrences(suffix.positive, kPlaceholder) != 1) {
        throw Error("suffix must contain the placeholder exactly once");
    }
}

std::vector<std::string> placeholder_literals(int64_t n_tokens) {
    std::vector<std::string> lits;
    lits.reserve(static_cast<size_t>(n_tokens));
    for (int64_t i = 1; i <= n_tokens; ++i) {
        lits.push_back("[V_" + std::to_string(i) + "]");
    }
    return lits;
}

std::string expand_placeholder(const std::string& text, int64_t n_tokens) {
    if (n_tokens < 1) throw Error("n_tokens must be positive");
    const size_t occurrences = count_occurrences(text, kPlaceholder);
    if (occurrences == 0) throw Error("missing placeholder [V] in \"" + text + "\"");
    if (occurrences > 1) throw Error("duplicated placeholder [V] in \"" + text + "\"");
    std::string joined;
    for (const std::string& lit : placeholder_literals(n_tokens)) {
        if (!joined.empty()) joined += ' ';
        joined += lit;
    }
    return replace_once(text, kPlaceholder, joined);
}

std::string render_with_suffix(const ContextualTemplate& tmpl, const std::string& suffix_text) {
    validate_template(tmpl);
    return replace_once(tmpl.text, kRuleSlot, suffix_text);
}

namespace {

TokenSpan locate_span(const std::vector<int64_t>& ids, const std::vector<int64_t>& pseudo_ids,
                      const std::string& text) {
    const auto it = std::find(ids.begin(), ids.end(), pseudo_ids.front());
    if (it == ids.end()) {
        throw Error("placeholder tokens not found after tokenization of \"" + text + "\"");
    }
    const int64_t begin = it - ids.begin();
    for (size_t k = 0; k < pseudo_ids.size(); ++k) {
        const size_t pos = static_cast<size_t>(begin) + k;
        if (pos >= ids.size() || ids[pos] != pseudo_ids[k]) {
            throw Error("placeholder tokens are not a contiguous run in \"" + text + "\"");
        }
    }
    return TokenSpan{begin, begin + static_cast<int64_t>(pseudo_ids.size())};
}

} // namespace

PromptTriple build_prompt_triple(const ContextualTemplate& tmpl, const LogicalSuffix& suffix, int64_t n_tokens,
                                 Tokenizer& tokenizer) {
    validate_template(tmpl);
    validate_suffix(suffix);
    if (n_tokens < 1) throw Error("n_tokens must be positive");

    PromptTriple triple;
    triple.contextual = tmpl;
    triple.n_tokens = n_tokens;
    triple.positive_text = render_with_suffix(tmpl, expand_placeholder(suffix.positive, n_tokens));
    triple.negative_text = render_with_suffix(tmpl, expand_placeholder(suffix.negative, n_tokens));

    std::vector<int64_t> pseudo_ids;
    for (const std::string& lit : placeholder_literals(n_tokens)) {
        pseudo_ids.push_back(tokenizer.register_pseudo_token(lit));
    }

    triple.positive_ids = tokenizer.encode(triple.positive_text);
    triple.negative_ids = tokenizer.encode(triple.negative_text);

    const int64_t budget = tokenizer.max_tokens();
    const int64_t longest = std::max<int64_t>(triple.positive_ids.size(), triple.negative_ids.size());
    if (longest > budget) {
        throw TokenBudgetError("prompt needs " + std::to_string(longest) + " tokens but the backbone accepts " +
                               std::to_string(budget) + " (context uses " +
                               std::to_string(longest - n_tokens) + ", placeholder uses " +
                               std::to_string(n_tokens) + ")");
    }

    triple.positive_span = locate_span(triple.positive_ids, pseudo_ids, triple.positive_text);
    triple.negative_span = locate_span(triple.negative_ids, pseudo_ids, triple.negative_text);
    return triple;
}

const ContextualTemplate& sample_contextual(const std::vector<ContextualTemplate>& set, Rng& rng) {
    if (set.empty()) throw Error("cannot sample from an empty template set");
    const int64_t i = rng.uniform_int(0, static_cast<int64_t>(set.size()) - 1);
    return set[static_cast<size_t>(i)];
}

std::vector<ContextualTemplate> load_template_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open template file: " + path);
    std::vector<ContextualTemplate> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string trimmed = line;
        const size_t first = trimmed.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (trimmed[first] == '#') continue;
        ContextualTemplate tmpl{line};
        validate_template(tmpl);
        out.push_back(std::move(tmpl));
    }
    if (out.empty()) throw Error("template file has no templates: " + path);
    return out;
}

const std::vector<ContextualTemplate>& default_templates() {
    static const std::vector<ContextualTemplate> set = [] {
        std::vector<ContextualTemplate> v;
        for (const char* t : kDefaultTemplates) v.push_back(ContextualTemplate{t});
        return v;
    }();
    return set;
}

std::vector<ContextualTemplate> preset_templates(PromptPreset preset) {
    switch (preset) {
        case PromptPreset::P1:
            return {ContextualTemplate{"A photo {rule}"}};
        case PromptPreset::P2:
            return {ContextualTemplate{"Fresh fruits are hanging on the branch {rule}"}};
        case PromptPreset::P3:
            return default_templates();
    }
    return default_templates();
}

} // namespace logdef
