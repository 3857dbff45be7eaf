#include "logdef/schedule.hpp"

#include <cmath>
#include <string>

#include "logdef/errors.hpp"

namespace logdef {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double NoiseSchedule::alpha_at(int64_t t) const {
    require_valid_t(t);
    return alpha[static_cast<size_t>(t)];
}

double NoiseSchedule::sigma_at(int64_t t) const {
    require_valid_t(t);
    return sigma[static_cast<size_t>(t)];
}

void NoiseSchedule::require_valid_t(int64_t t) const {
    if (t < 0 || t > steps()) {
        throw Error("timestep " + std::to_string(t) + " outside schedule range [0, " + std::to_string(steps()) + "]");
    }
}

NoiseSchedule NoiseSchedule::cosine(int64_t T) {
    if (T < 1) throw Error("schedule needs at least one step");
    NoiseSchedule s;
    s.alpha.resize(static_cast<size_t>(T) + 1);
    s.sigma.resize(static_cast<size_t>(T) + 1);
    for (int64_t t = 0; t <= T; ++t) {
        const double phase = 0.5 * kPi * double(t) / double(T + 1);
        s.alpha[static_cast<size_t>(t)] = std::cos(phase);
        s.sigma[static_cast<size_t>(t)] = std::sin(phase);
    }
    s.alpha[0] = 1.0;
    s.sigma[0] = 0.0;
    s.validate();
    return s;
}

NoiseSchedule NoiseSchedule::scaled_linear(int64_t T, double beta_start, double beta_end) {
    if (T < 1) throw Error("schedule needs at least one step");
    if (!(beta_start > 0.0) || !(beta_end > beta_start) || !(beta_end < 1.0)) {
        throw Error("scaled_linear: need 0 < beta_start < beta_end < 1");
    }
    NoiseSchedule s;
    s.alpha.resize(static_cast<size_t>(T) + 1);
    s.sigma.resize(static_cast<size_t>(T) + 1);
    s.alpha[0] = 1.0;
    s.sigma[0] = 0.0;
    const double sb0 = std::sqrt(beta_start);
    const double sb1 = std::sqrt(beta_end);
    double alpha_bar = 1.0;
    for (int64_t t = 1; t <= T; ++t) {
        const double frac = T > 1 ? double(t - 1) / double(T - 1) : 0.0;
        const double sb = sb0 + frac * (sb1 - sb0);
        alpha_bar *= 1.0 - sb * sb;
        s.alpha[static_cast<size_t>(t)] = std::sqrt(alpha_bar);
        s.sigma[static_cast<size_t>(t)] = std::sqrt(1.0 - alpha_bar);
    }
    s.validate();
    return s;
}

void NoiseSchedule::validate() const {
    if (alpha.size() != sigma.size() || alpha.size() < 2) throw Error("schedule arrays malformed");
    if (alpha[0] != 1.0 || sigma[0] != 0.0) throw Error("schedule must start at (alpha, sigma) = (1, 0)");
    for (size_t t = 1; t < alpha.size(); ++t) {
        if (!(alpha[t] > 0.0) || alpha[t] > alpha[t - 1]) throw Error("alpha must stay positive and non-increasing");
        if (sigma[t] < sigma[t - 1]) throw Error("sigma must be non-decreasing");
    }
}

} // namespace logdef
