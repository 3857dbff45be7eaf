#include "logdef/tokenizer.hpp"

#include <cctype>

namespace logdef {

namespace {

bool is_peelable_punct(char c) {
    switch (c) {
        case '.':
        case ',':
        case ';':
        case ':':
        case '!':
        case '?':
        case '"':
        case '(':
        case ')':
            return true;
        default:
            return false;
    }
}

bool looks_like_pseudo(const std::string& w) {
    return w.size() >= 2 && w.front() == '[' && w.back() == ']';
}

} // namespace

std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        std::string word = text.substr(i, j - i);
        i = j;

        // Peel punctuation off both ends unless the chunk is a bracketed
        // placeholder literal, which must stay atomic.
        std::string prefix, suffix;
        if (!looks_like_pseudo(word)) {
            size_t b = 0, e = word.size();
            while (b < e && is_peelable_punct(word[b])) ++b;
            while (e > b && is_peelable_punct(word[e - 1])) --e;
            prefix = word.substr(0, b);
            suffix = word.substr(e);
            word = word.substr(b, e - b);
        }
        for (char c : prefix) out.push_back(std::string(1, c));
        if (!word.empty()) out.push_back(word);
        for (char c : suffix) out.push_back(std::string(1, c));
    }
    return out;
}

int64_t WordTokenizer::word_id(const std::string& word) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : word) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return static_cast<int64_t>(h & 0x7fffffffffffffffull);
}

std::vector<int64_t> WordTokenizer::encode(const std::string& text) const {
    std::vector<int64_t> ids;
    for (const std::string& w : split_words(text)) {
        auto it = pseudo_.find(w);
        ids.push_back(it != pseudo_.end() ? it->second : word_id(w));
    }
    return ids;
}

int64_t WordTokenizer::register_pseudo_token(const std::string& literal) {
    auto it = pseudo_.find(literal);
    if (it != pseudo_.end()) return it->second;
    const int64_t id = -static_cast<int64_t>(pseudo_.size()) - 1;
    pseudo_.emplace(literal, id);
    return id;
}

} // namespace logdef
