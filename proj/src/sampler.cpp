#include "logdef/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "logdef/errors.hpp"
#include "logdef/imageio.hpp"
#include "logdef/kernels.hpp"
#include "logdef/prompts.hpp"

namespace logdef {

std::vector<int64_t> sampling_timesteps(int64_t T, int64_t steps) {
    if (steps < 1) throw Error("steps must be positive");
    std::vector<int64_t> ts;
    for (int64_t k = steps; k >= 1; --k) {
        const int64_t t = std::max<int64_t>(1, std::llround(double(T) * double(k) / double(steps)));
        if (ts.empty() || ts.back() != t) ts.push_back(t);
    }
    return ts;
}

Conditioning conditioning_for_prompt(const std::string& prompt, const LogicalEmbedding* embedding,
                                     DiffusionBackend& backend) {
    if (prompt.find("[V]") == std::string::npos) {
        return backend.encode_plain_text(prompt);
    }
    if (embedding == nullptr) {
        throw Error("prompt contains [V] but no embedding was provided");
    }
    const int64_t n = embedding->n_tokens();
    const std::string expanded = expand_placeholder(prompt, n);

    Tokenizer& tok = backend.text_adapter().tokenizer();
    std::vector<int64_t> pseudo_ids;
    for (const std::string& lit : placeholder_literals(n)) {
        pseudo_ids.push_back(tok.register_pseudo_token(lit));
    }
    const std::vector<int64_t> ids = tok.encode(expanded);
    if (static_cast<int64_t>(ids.size()) > tok.max_tokens()) {
        throw TokenBudgetError("prompt needs " + std::to_string(ids.size()) + " tokens but the backbone accepts " +
                               std::to_string(tok.max_tokens()));
    }
    const auto it = std::find(ids.begin(), ids.end(), pseudo_ids.front());
    if (it == ids.end()) throw Error("placeholder tokens lost during tokenization");
    TokenSpan span{it - ids.begin(), it - ids.begin() + n};
    for (int64_t k = 0; k < n; ++k) {
        if (ids[static_cast<size_t>(span.begin + k)] != pseudo_ids[static_cast<size_t>(k)]) {
            throw Error("placeholder tokens are not contiguous after tokenization");
        }
    }
    return splice_conditioning(ids, span, embedding, backend.text_adapter());
}

namespace {

std::string negative_variant(const std::string& prompt) {
    const std::string needle = "with the rule";
    const size_t pos = prompt.find(needle);
    if (pos == std::string::npos) {
        throw Error("--negative-suffix requires a prompt containing \"with the rule\"");
    }
    std::string out = prompt;
    out.insert(pos, "not ");
    return out;
}

} // namespace

std::vector<Tensor> generate(const SampleRequest& req, DiffusionBackend& backend) {
    if (req.count < 1) throw Error("count must be positive");
    if (req.steps < 1) throw Error("steps must be positive");
    if (!(req.cfg_scale > 0.0)) throw Error("cfg scale must be positive");

    const bool has_placeholder = req.prompt_text.find("[V]") != std::string::npos;
    if (has_placeholder && !req.embedding.has_value()) {
        throw Error("prompt contains [V] but no embedding was provided");
    }
    const LogicalEmbedding* emb = req.embedding.has_value() ? &*req.embedding : nullptr;
    const Conditioning cond = conditioning_for_prompt(req.prompt_text, emb, backend);

    // Guidance reference: the empty prompt, or the negated rule suffix when
    // explicitly opted in.
    const bool guided = req.cfg_scale != 1.0 || req.negative_suffix;
    Conditioning ref;
    if (guided) {
        ref = req.negative_suffix ? conditioning_for_prompt(negative_variant(req.prompt_text), emb, backend)
                                  : backend.encode_plain_text("");
    }

    const NoiseSchedule& sched = backend.schedule();
    const std::vector<int64_t> ts = sampling_timesteps(sched.steps(), req.steps);
    const std::vector<int64_t> shape = backend.latent_shape();
    Rng rng(static_cast<uint64_t>(req.seed));

    std::vector<Tensor> outputs;
    outputs.reserve(static_cast<size_t>(req.count));
    for (int64_t i = 0; i < req.count; ++i) {
        Tensor z = randn(shape, rng);
        for (size_t k = 0; k < ts.size(); ++k) {
            const int64_t t = ts[k];
            const int64_t t_prev = k + 1 < ts.size() ? ts[k + 1] : 0;

            Tensor eps_hat;
            if (guided) {
                const auto eps = backend.predict_noise({z, z}, {t, t}, {cond, ref});
                eps_hat = Tensor(eps[0].shape);
                kernels::weighted_pair(eps[0].data.data(), eps[1].data.data(), req.cfg_scale, 1.0 - req.cfg_scale,
                                       eps_hat.data.data(), eps_hat.numel());
            } else {
                eps_hat = backend.predict_noise({z}, {t}, {cond})[0];
            }

            const double a_t = sched.alpha_at(t), s_t = sched.sigma_at(t);
            const double a_p = sched.alpha_at(t_prev), s_p = sched.sigma_at(t_prev);
            double noise_std = 0.0;
            if (req.eta > 0.0 && s_t > 0.0 && s_p > 0.0) {
                const double ratio = std::min(1.0, (a_t * a_t) / (a_p * a_p));
                noise_std = req.eta * (s_p / s_t) * std::sqrt(1.0 - ratio);
            }
            const double dir = std::sqrt(std::max(s_p * s_p - noise_std * noise_std, 0.0));

            for (int64_t e = 0; e < z.numel(); ++e) {
                const double z0_hat = (z[e] - s_t * eps_hat[e]) / a_t;
                z[e] = a_p * z0_hat + dir * eps_hat[e];
            }
            if (noise_std > 0.0) {
                for (int64_t e = 0; e < z.numel(); ++e) z[e] += noise_std * rng.normal();
            }
            if (!z.all_finite()) {
                throw Error("non-finite latent at sampling step " + std::to_string(k) + " (t=" + std::to_string(t) +
                            ")");
            }
        }
        outputs.push_back(backend.decode_latent(z));
    }
    return outputs;
}

GridMode parse_grid_mode(const std::string& name) {
    if (name == "initial") return GridMode::Initial;
    if (name == "rules") return GridMode::Rules;
    if (name == "ours") return GridMode::Ours;
    throw Error("unknown grid mode '" + name + "' (expected initial, rules or ours)");
}

std::string grid_mode_name(GridMode m) {
    switch (m) {
        case GridMode::Initial: return "initial";
        case GridMode::Rules: return "rules";
        case GridMode::Ours: return "ours";
    }
    return "initial";
}

std::vector<std::string> generate_grid(const GridRequest& req, DiffusionBackend& backend) {
    if (req.categories.empty() || req.modes.empty()) throw Error("grid needs categories and modes");
    std::filesystem::create_directories(req.out_dir);

    std::vector<std::string> files;
    for (const std::string& category : req.categories) {
        for (const GridMode mode : req.modes) {
            SampleRequest r = req.defaults;
            const std::string base = "a photo of " + category + " on the tree";
            switch (mode) {
                case GridMode::Initial:
                    r.prompt_text = base;
                    r.embedding.reset();
                    break;
                case GridMode::Rules:
                    r.prompt_text = base + ", " + req.rule_description;
                    r.embedding.reset();
                    break;
                case GridMode::Ours:
                    if (!req.defaults.embedding.has_value()) {
                        throw Error("grid mode 'ours' requires an embedding");
                    }
                    r.prompt_text = base + " with the rule of [V]";
                    break;
            }
            const std::vector<Tensor> outs = generate(r, backend);
            const std::string path = req.out_dir + "/" + category + "_" + grid_mode_name(mode) + "_" +
                                     std::to_string(r.seed) + ".png";
            if (outs.front().shape.size() == 1) {
                save_scatter_png(path, outs);
            } else {
                save_png(path, outs.front());
            }
            files.push_back(path);
        }
    }
    return files;
}

} // namespace logdef
