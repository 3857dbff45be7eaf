#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "logdef/rng.hpp"
#include "logdef/schedule.hpp"
#include "logdef/tensor.hpp"

namespace logdef {

enum class ToyCondition { Positive, Negative, Unconditional };

// Fully analytic two-mode diffusion world: equal-weight Gaussian mixture in
// the plane with shared isotropic covariance, plus a cosine noise schedule.
// Every optimal noise prediction has a closed form, which makes this world
// the oracle for the guidance and training mathematics.
struct ToyWorld {
    std::array<double, 2> mu_pos{3.0, 0.0};
    std::array<double, 2> mu_neg{-3.0, 0.0};
    double sigma = 1.0;
    NoiseSchedule schedule;

    ToyWorld(std::array<double, 2> mp, std::array<double, 2> mn, double s, int64_t T);
    static ToyWorld standard() { return ToyWorld({3.0, 0.0}, {-3.0, 0.0}, 1.0, 100); }

    int64_t T() const { return schedule.steps(); }

    // Marginal variance of z_t under one mode: alpha^2 sigma^2 + sigma_t^2.
    double marginal_variance(int64_t t) const;

    // Optimal noise prediction:
    //   conditional: sigma_t * (z_t - alpha_t * mu_c) / (alpha_t^2 sigma^2 + sigma_t^2)
    //   unconditional: responsibility-weighted average of the two conditional ones
    Tensor analytic_eps(const Tensor& z_t, int64_t t, ToyCondition c) const;

    // Posterior responsibility p(positive | z_t) from the noised marginals.
    double responsibility_pos(const Tensor& z_t, int64_t t) const;

    // Log density of z_t under the requested conditioning (mixture for
    // Unconditional); the finite-difference score oracle differentiates this.
    double log_density(const Tensor& z_t, int64_t t, ToyCondition c) const;

    // i.i.d. draws in data space (t = 0); deterministic under the rng.
    std::vector<Tensor> sample_world(ToyCondition c, int64_t n, Rng& rng) const;
};

// Fraction of points strictly nearer mu_pos than mu_neg (Euclidean).
double steering_rate(const std::vector<Tensor>& points, const ToyWorld& world);

} // namespace logdef
