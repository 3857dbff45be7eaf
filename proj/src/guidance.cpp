#include "logdef/guidance.hpp"

#include <cmath>

#include "logdef/errors.hpp"
#include "logdef/kernels.hpp"

namespace logdef {

GuidedScore combine_scores(const Tensor& eps_pos, const Tensor& eps_neg, double omega) {
    require_same_shape(eps_pos, eps_neg, "combine_scores");
    if (!std::isfinite(omega) || omega < 0.0) {
        throw Error("combine_scores: omega must be finite and non-negative, got " + std::to_string(omega));
    }
    if (!eps_pos.all_finite() || !eps_neg.all_finite()) {
        throw Error("combine_scores: non-finite input");
    }
    GuidedScore g;
    g.eps_pos = eps_pos;
    g.eps_neg = eps_neg;
    g.omega = omega;
    g.combined = Tensor(eps_pos.shape);
    kernels::guided_combine(eps_pos.data.data(), eps_neg.data.data(), omega, g.combined.data.data(),
                            g.combined.numel());
    return g;
}

Tensor implicit_classifier_gradient(const Tensor& eps_cond, const Tensor& eps_uncond, double sigma_t) {
    require_same_shape(eps_cond, eps_uncond, "implicit_classifier_gradient");
    if (!(sigma_t > 0.0)) {
        throw Error("implicit_classifier_gradient: sigma_t must be positive");
    }
    Tensor g(eps_cond.shape);
    for (int64_t i = 0; i < g.numel(); ++i) {
        g[i] = -(eps_cond[i] - eps_uncond[i]);
    }
    return g;
}

IdentityCheck verify_equivalence(const Tensor& eps_pos_ctx, const Tensor& eps_cond_only_pos,
                                 const Tensor& eps_cond_only_neg, const Tensor& eps_uncond, double omega,
                                 double sigma_t) {
    require_same_shape(eps_pos_ctx, eps_cond_only_pos, "verify_equivalence");
    require_same_shape(eps_pos_ctx, eps_cond_only_neg, "verify_equivalence");
    require_same_shape(eps_pos_ctx, eps_uncond, "verify_equivalence");

    const Tensor g_pos = implicit_classifier_gradient(eps_cond_only_pos, eps_uncond, sigma_t);
    const Tensor g_neg = implicit_classifier_gradient(eps_cond_only_neg, eps_uncond, sigma_t);

    const int64_t n = eps_pos_ctx.numel();
    Tensor via_classifiers(eps_pos_ctx.shape);
    Tensor direct(eps_pos_ctx.shape);
    for (int64_t i = 0; i < n; ++i) {
        via_classifiers[i] = eps_pos_ctx[i] - omega * g_pos[i] + omega * g_neg[i];
        direct[i] = eps_pos_ctx[i] + omega * (eps_cond_only_pos[i] - eps_cond_only_neg[i]);
    }

    IdentityCheck check;
    check.residual = kernels::max_abs_diff(via_classifiers.data.data(), direct.data.data(), n);
    double scale = kernels::max_abs(eps_pos_ctx.data.data(), n);
    scale = std::max(scale, kernels::max_abs(eps_cond_only_pos.data.data(), n));
    scale = std::max(scale, kernels::max_abs(eps_cond_only_neg.data.data(), n));
    scale = std::max(scale, kernels::max_abs(eps_uncond.data.data(), n));
    check.scale = std::max(1.0, omega) * scale;
    return check;
}

double factorized_difference(const Tensor& eps_full_pos, const Tensor& eps_full_neg, const Tensor& eps_ctxfree_pos,
                             const Tensor& eps_ctxfree_neg) {
    require_same_shape(eps_full_pos, eps_full_neg, "factorized_difference");
    require_same_shape(eps_full_pos, eps_ctxfree_pos, "factorized_difference");
    require_same_shape(eps_full_pos, eps_ctxfree_neg, "factorized_difference");

    const int64_t n = eps_full_pos.numel();
    Tensor full_diff(eps_full_pos.shape);
    Tensor free_diff(eps_full_pos.shape);
    for (int64_t i = 0; i < n; ++i) {
        full_diff[i] = eps_full_pos[i] - eps_full_neg[i];
        free_diff[i] = eps_ctxfree_pos[i] - eps_ctxfree_neg[i];
    }
    return kernels::max_abs_diff(full_diff.data.data(), free_diff.data.data(), n);
}

} // namespace logdef
