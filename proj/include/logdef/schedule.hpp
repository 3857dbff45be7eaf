#pragma once

#include <cstdint>
#include <vector>

namespace logdef {

// Variance-preserving forward-diffusion schedule, indexed t = 0..T with the
// identity point at t = 0: alpha[0] = 1, sigma[0] = 0. The latent at step t
// is z_t = alpha[t] * z_0 + sigma[t] * eps.
struct NoiseSchedule {
    std::vector<double> alpha;
    std::vector<double> sigma;

    int64_t steps() const { return static_cast<int64_t>(alpha.size()) - 1; }

    double alpha_at(int64_t t) const;
    double sigma_at(int64_t t) const;
    void require_valid_t(int64_t t) const;

    // Cosine-profile schedule used by the analytic testbed:
    //   alpha[t] = cos(pi/2 * t / (T + 1)), sigma[t] = sin(pi/2 * t / (T + 1)).
    // The T+1 denominator keeps alpha[T] strictly positive so the terminal
    // step is still invertible.
    static NoiseSchedule cosine(int64_t T);

    // Scaled-linear beta schedule (beta linear in sqrt space), the published
    // profile of the v1.x latent-diffusion checkpoints:
    //   defaults beta_start = 0.00085, beta_end = 0.012, T = 1000.
    static NoiseSchedule scaled_linear(int64_t T, double beta_start, double beta_end);

    // Monotonicity and range checks; throws on violation.
    void validate() const;
};

} // namespace logdef
