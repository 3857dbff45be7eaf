#include "logdef/toy_backend.hpp"

#include <algorithm>
#include <cmath>

#include "logdef/errors.hpp"
#include "logdef/sha256.hpp"

namespace logdef {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double hash_normal(uint64_t key) {
    // Deterministic standard normal from two hashed uniforms.
    const double u1 = 1.0 - double(splitmix64(key) >> 11) * 0x1.0p-53;
    const double u2 = double(splitmix64(key ^ 0xabcdef1234567890ull) >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

const int64_t kNotTokenId = WordTokenizer::word_id("not");

} // namespace

std::string ToyBackend::parameter_digest() const {
    Sha256 h;
    const auto add = [&h](const void* p, size_t n) { h.update(p, n); };
    add(world_.mu_pos.data(), sizeof(world_.mu_pos));
    add(world_.mu_neg.data(), sizeof(world_.mu_neg));
    add(&world_.sigma, sizeof(world_.sigma));
    add(world_.schedule.alpha.data(), world_.schedule.alpha.size() * sizeof(double));
    add(world_.schedule.sigma.data(), world_.schedule.sigma.size() * sizeof(double));
    const double bias = kNegationBias, table = kTableScale;
    add(&bias, sizeof(bias));
    add(&table, sizeof(table));
    return Sha256::hex(h.finish());
}

Tensor ToyBackend::encode_image(const Tensor& image) {
    if (image.numel() != 2) {
        throw ShapeError("toy encoder expects 2-vectors, got " + image.shape_str());
    }
    if (!image.all_finite()) throw Error("toy encoder: non-finite input");
    return image;
}

Tensor ToyBackend::decode_latent(const Tensor& z) {
    if (z.numel() != 2) throw ShapeError("toy decoder expects 2-vectors, got " + z.shape_str());
    if (!z.all_finite()) throw Error("toy decoder: non-finite latent");
    return z;
}

std::vector<double> ToyBackend::table_row(int64_t token_id) const {
    const uint64_t key = static_cast<uint64_t>(token_id);
    return {kTableScale * hash_normal(key * 2 + 1), kTableScale * hash_normal(key * 2 + 2)};
}

std::pair<Conditioning, Conditioning> ToyBackend::encode_text(const PromptTriple& triple,
                                                              const LogicalEmbedding& embedding) {
    ensure_dim_compatible(embedding, embed_dim(), backbone_id());
    if (embedding.n_tokens() != triple.n_tokens) {
        throw ShapeError("embedding has " + std::to_string(embedding.n_tokens()) + " rows but the prompt expands " +
                         std::to_string(triple.n_tokens) + " placeholder tokens");
    }
    if (tokenizer_.encode(triple.positive_text) != triple.positive_ids ||
        tokenizer_.encode(triple.negative_text) != triple.negative_ids) {
        throw Error("stale prompt triple: token ids no longer match its texts");
    }
    return {splice_conditioning(triple.positive_ids, triple.positive_span, &embedding, *this),
            splice_conditioning(triple.negative_ids, triple.negative_span, &embedding, *this)};
}

Conditioning ToyBackend::encode_plain_text(const std::string& text) {
    return splice_conditioning(tokenizer_.encode(text), TokenSpan{0, 0}, nullptr, *this);
}

ToyBackend::GateInfo ToyBackend::gate_info(const Conditioning& c) const {
    GateInfo info;
    info.negated = std::find(c.token_ids.begin(), c.token_ids.end(), kNotTokenId) != c.token_ids.end();
    if (!c.has_placeholder()) return info;

    const int64_t n = c.span.length();
    for (int64_t i = c.span.begin; i < c.span.end; ++i) {
        info.pooled[0] += c.embedded.at(i, 0);
        info.pooled[1] += c.embedded.at(i, 1);
    }
    info.pooled[0] /= double(n);
    info.pooled[1] /= double(n);

    const double u_pos = info.pooled[0] * world_.mu_pos[0] + info.pooled[1] * world_.mu_pos[1];
    double u_neg = info.pooled[0] * world_.mu_neg[0] + info.pooled[1] * world_.mu_neg[1];
    if (info.negated) u_neg += kNegationBias;

    const double m = std::max(u_pos, u_neg);
    const double ep = std::exp(u_pos - m), en = std::exp(u_neg - m);
    info.g = ep / (ep + en);
    return info;
}

double ToyBackend::gate_weight(const Conditioning& c) const { return gate_info(c).g; }

Tensor ToyBackend::forward_one(const Tensor& z_t, int64_t t, const Conditioning& c) const {
    if (!c.has_placeholder()) {
        return world_.analytic_eps(z_t, t, ToyCondition::Unconditional);
    }
    const GateInfo gi = gate_info(c);
    const Tensor fp = world_.analytic_eps(z_t, t, ToyCondition::Positive);
    const Tensor fn = world_.analytic_eps(z_t, t, ToyCondition::Negative);
    Tensor out({2});
    out[0] = gi.g * fp[0] + (1.0 - gi.g) * fn[0];
    out[1] = gi.g * fp[1] + (1.0 - gi.g) * fn[1];
    return out;
}

std::vector<Tensor> ToyBackend::predict_noise(const std::vector<Tensor>& z_t, const std::vector<int64_t>& t,
                                              const std::vector<Conditioning>& cond) {
    if (z_t.size() != t.size() || z_t.size() != cond.size()) {
        throw ShapeError("predict_noise: batch arrays disagree in length");
    }
    std::vector<Tensor> out;
    out.reserve(z_t.size());
    for (size_t i = 0; i < z_t.size(); ++i) {
        out.push_back(forward_one(z_t[i], t[i], cond[i]));
    }
    return out;
}

DiffusionBackend::TracedPrediction ToyBackend::predict_noise_traced(const std::vector<Tensor>& z_t,
                                                                    const std::vector<int64_t>& t,
                                                                    const std::vector<Conditioning>& cond,
                                                                    const LogicalEmbedding& embedding) {
    if (z_t.size() != t.size() || z_t.size() != cond.size()) {
        throw ShapeError("predict_noise_traced: batch arrays disagree in length");
    }
    ensure_dim_compatible(embedding, embed_dim(), backbone_id());

    struct SampleTape {
        bool trainable = false;
        double g = 0.5;
        Tensor field_diff; // f_pos - f_neg
        int64_t span_len = 0;
    };
    auto tapes = std::make_shared<std::vector<SampleTape>>();
    tapes->reserve(z_t.size());

    TracedPrediction traced;
    traced.eps.reserve(z_t.size());
    for (size_t i = 0; i < z_t.size(); ++i) {
        SampleTape tape;
        if (cond[i].has_placeholder()) {
            if (cond[i].span.length() != embedding.n_tokens()) {
                throw ShapeError("conditioning span does not match the embedding row count");
            }
            tape.trainable = true;
            tape.g = gate_info(cond[i]).g;
            const Tensor fp = world_.analytic_eps(z_t[i], t[i], ToyCondition::Positive);
            const Tensor fn = world_.analytic_eps(z_t[i], t[i], ToyCondition::Negative);
            tape.field_diff = Tensor({2});
            tape.field_diff[0] = fp[0] - fn[0];
            tape.field_diff[1] = fp[1] - fn[1];
            tape.span_len = cond[i].span.length();
        }
        traced.eps.push_back(forward_one(z_t[i], t[i], cond[i]));
        tapes->push_back(std::move(tape));
    }

    const std::array<double, 2> mu_pos = world_.mu_pos, mu_neg = world_.mu_neg;
    const int64_t n_tokens = embedding.n_tokens();
    traced.backward = [tapes, mu_pos, mu_neg, n_tokens](const std::vector<Tensor>& upstream) {
        if (upstream.size() != tapes->size()) {
            throw ShapeError("backward: upstream batch size mismatch");
        }
        Tensor grad({n_tokens, 2});
        for (size_t i = 0; i < tapes->size(); ++i) {
            const SampleTape& tape = (*tapes)[i];
            if (!tape.trainable) continue;
            const double dl_dg = upstream[i][0] * tape.field_diff[0] + upstream[i][1] * tape.field_diff[1];
            const double dg_dlogit = tape.g * (1.0 - tape.g);
            const double coeff = dl_dg * dg_dlogit / double(tape.span_len);
            const double gx = coeff * (mu_pos[0] - mu_neg[0]);
            const double gy = coeff * (mu_pos[1] - mu_neg[1]);
            for (int64_t r = 0; r < n_tokens; ++r) {
                grad.at(r, 0) += gx;
                grad.at(r, 1) += gy;
            }
        }
        return grad;
    };
    return traced;
}

} // namespace logdef
