#include "logdef/backend.hpp"

#include "logdef/errors.hpp"

namespace logdef {

NoisedLatent DiffusionBackend::add_noise(const Tensor& z, const Tensor& eps, int64_t t) const {
    require_same_shape(z, eps, "add_noise");
    const NoiseSchedule& s = schedule();
    s.require_valid_t(t);

    NoisedLatent out;
    out.t = t;
    out.alpha_t = s.alpha_at(t);
    out.sigma_t = s.sigma_at(t);
    out.eps = eps;
    out.z_t = Tensor(z.shape);
    for (int64_t i = 0; i < z.numel(); ++i) {
        out.z_t[i] = out.alpha_t * z[i] + out.sigma_t * eps[i];
    }
    return out;
}

Tensor randn(const std::vector<int64_t>& shape, Rng& rng) {
    Tensor t(shape);
    for (double& v : t.data) v = rng.normal();
    return t;
}

Conditioning splice_conditioning(const std::vector<int64_t>& ids, TokenSpan span, const LogicalEmbedding* embedding,
                                 TextAdapter& adapter) {
    if (span.length() > 0) {
        if (embedding == nullptr) throw Error("conditioning with placeholder span requires an embedding");
        if (span.length() != embedding->n_tokens()) {
            throw ShapeError("span covers " + std::to_string(span.length()) + " tokens but embedding has " +
                             std::to_string(embedding->n_tokens()) + " rows");
        }
        ensure_dim_compatible(*embedding, adapter.embed_dim(), adapter.backbone_id());
    }
    const int64_t d = adapter.embed_dim();
    Conditioning c;
    c.token_ids = ids;
    c.span = span;
    c.embedded = Tensor({static_cast<int64_t>(ids.size()), d});
    for (int64_t i = 0; i < static_cast<int64_t>(ids.size()); ++i) {
        if (i >= span.begin && i < span.end) {
            for (int64_t k = 0; k < d; ++k) c.embedded.at(i, k) = embedding->rows.at(i - span.begin, k);
        } else {
            const std::vector<double> row = adapter.table_row(ids[static_cast<size_t>(i)]);
            for (int64_t k = 0; k < d; ++k) c.embedded.at(i, k) = row[static_cast<size_t>(k)];
        }
    }
    return c;
}

} // namespace logdef
