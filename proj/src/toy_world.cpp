#include "logdef/toy_world.hpp"

#include <cmath>

#include "logdef/errors.hpp"

namespace logdef {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double sq_dist(const Tensor& z, const std::array<double, 2>& mu, double scale) {
    const double d0 = z[0] - scale * mu[0];
    const double d1 = z[1] - scale * mu[1];
    return d0 * d0 + d1 * d1;
}

void require_point(const Tensor& z) {
    if (z.numel() != 2) throw ShapeError("toy world expects 2-vectors, got " + z.shape_str());
}

} // namespace

ToyWorld::ToyWorld(std::array<double, 2> mp, std::array<double, 2> mn, double s, int64_t T)
    : mu_pos(mp), mu_neg(mn), sigma(s), schedule(NoiseSchedule::cosine(T)) {
    if (!(sigma > 0.0)) throw Error("toy world sigma must be positive");
    const double dx = mu_pos[0] - mu_neg[0], dy = mu_pos[1] - mu_neg[1];
    if (std::sqrt(dx * dx + dy * dy) <= 4.0 * sigma) {
        throw Error("toy world modes must be separated by more than 4 sigma");
    }
}

double ToyWorld::marginal_variance(int64_t t) const {
    const double a = schedule.alpha_at(t), s = schedule.sigma_at(t);
    return a * a * sigma * sigma + s * s;
}

double ToyWorld::responsibility_pos(const Tensor& z_t, int64_t t) const {
    require_point(z_t);
    const double a = schedule.alpha_at(t);
    const double v = marginal_variance(t);
    const double logit = (sq_dist(z_t, mu_neg, a) - sq_dist(z_t, mu_pos, a)) / (2.0 * v);
    return 1.0 / (1.0 + std::exp(-logit));
}

Tensor ToyWorld::analytic_eps(const Tensor& z_t, int64_t t, ToyCondition c) const {
    require_point(z_t);
    const double a = schedule.alpha_at(t);
    const double s = schedule.sigma_at(t);
    const double v = marginal_variance(t);

    const auto conditional = [&](const std::array<double, 2>& mu) {
        Tensor e({2});
        e[0] = s * (z_t[0] - a * mu[0]) / v;
        e[1] = s * (z_t[1] - a * mu[1]) / v;
        return e;
    };

    switch (c) {
        case ToyCondition::Positive: return conditional(mu_pos);
        case ToyCondition::Negative: return conditional(mu_neg);
        case ToyCondition::Unconditional: {
            const double r = responsibility_pos(z_t, t);
            const Tensor ep = conditional(mu_pos);
            const Tensor en = conditional(mu_neg);
            Tensor e({2});
            e[0] = r * ep[0] + (1.0 - r) * en[0];
            e[1] = r * ep[1] + (1.0 - r) * en[1];
            return e;
        }
    }
    throw Error("unknown toy condition");
}

double ToyWorld::log_density(const Tensor& z_t, int64_t t, ToyCondition c) const {
    require_point(z_t);
    const double a = schedule.alpha_at(t);
    const double v = marginal_variance(t);
    const auto log_gauss = [&](const std::array<double, 2>& mu) {
        return -kLog2Pi - std::log(v) - sq_dist(z_t, mu, a) / (2.0 * v);
    };
    switch (c) {
        case ToyCondition::Positive: return log_gauss(mu_pos);
        case ToyCondition::Negative: return log_gauss(mu_neg);
        case ToyCondition::Unconditional: {
            const double lp = log_gauss(mu_pos), ln = log_gauss(mu_neg);
            const double m = std::max(lp, ln);
            return m + std::log(0.5 * std::exp(lp - m) + 0.5 * std::exp(ln - m));
        }
    }
    throw Error("unknown toy condition");
}

std::vector<Tensor> ToyWorld::sample_world(ToyCondition c, int64_t n, Rng& rng) const {
    if (n <= 0) throw Error("sample_world: n must be positive");
    std::vector<Tensor> out;
    out.reserve(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
        const std::array<double, 2>* mu = nullptr;
        switch (c) {
            case ToyCondition::Positive: mu = &mu_pos; break;
            case ToyCondition::Negative: mu = &mu_neg; break;
            case ToyCondition::Unconditional: mu = rng.uniform() < 0.5 ? &mu_pos : &mu_neg; break;
        }
        Tensor p({2});
        p[0] = (*mu)[0] + sigma * rng.normal();
        p[1] = (*mu)[1] + sigma * rng.normal();
        out.push_back(std::move(p));
    }
    return out;
}

double steering_rate(const std::vector<Tensor>& points, const ToyWorld& world) {
    if (points.empty()) throw Error("steering_rate: empty point set");
    int64_t hits = 0;
    for (const Tensor& p : points) {
        if (p.numel() != 2) throw ShapeError("steering_rate expects 2-vectors");
        if (sq_dist(p, world.mu_pos, 1.0) < sq_dist(p, world.mu_neg, 1.0)) ++hits;
    }
    return double(hits) / double(points.size());
}

} // namespace logdef
