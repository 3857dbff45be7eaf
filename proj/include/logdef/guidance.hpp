#pragma once

#include "logdef/tensor.hpp"

namespace logdef {

// Combined noise estimate and its two branch inputs:
//   combined = eps_pos + omega * (eps_pos - eps_neg)
struct GuidedScore {
    Tensor eps_pos;
    Tensor eps_neg;
    double omega = 0.0;
    Tensor combined;
};

// omega must be finite and >= 0 (anti-guidance is deliberately rejected).
GuidedScore combine_scores(const Tensor& eps_pos, const Tensor& eps_neg, double omega);

// Difference-of-predictions form of the implicit classifier gradient,
// returned as -(eps_cond - eps_uncond). The sign follows the source
// convention for the sigma-scaled posterior log-gradient; sigma_t itself
// cancels in the equivalence check but is validated here so callers keep it
// threaded through in score units.
Tensor implicit_classifier_gradient(const Tensor& eps_cond, const Tensor& eps_uncond, double sigma_t);

struct IdentityCheck {
    double residual = 0.0; // max-norm difference between the two assemblies
    double scale = 0.0;    // max input magnitude, for relative comparison
    double relative() const { return scale > 0.0 ? residual / scale : residual; }
};

// Assembles the guided estimate two ways and reports the max-norm gap:
//  (i)  from the two implicit-classifier gradients:
//         eps_pos_ctx - omega*g(cond_pos, uncond) + omega*g(cond_neg, uncond)
//  (ii) directly: eps_pos_ctx + omega*(eps_cond_only_pos - eps_cond_only_neg)
// The unconditional terms cancel algebraically, so the residual is floating
// point noise; anything above ~1e-12 relative indicates a broken assembly.
IdentityCheck verify_equivalence(const Tensor& eps_pos_ctx, const Tensor& eps_cond_only_pos,
                                 const Tensor& eps_cond_only_neg, const Tensor& eps_uncond, double omega,
                                 double sigma_t);

// Diagnostic for the context-independence hypothesis: max-norm gap between
// the context-conditioned branch difference and the context-free one. No
// fixed bound; backends where the context merely shifts both branches give 0.
double factorized_difference(const Tensor& eps_full_pos, const Tensor& eps_full_neg, const Tensor& eps_ctxfree_pos,
                             const Tensor& eps_ctxfree_neg);

} // namespace logdef
