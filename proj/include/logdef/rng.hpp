#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace logdef {

// Deterministic random source. Distribution transforms are written out
// explicitly (std::*_distribution is implementation-defined), so streams are
// reproducible across platforms and serializable for checkpoint resume.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1).
    double uniform() {
        return double(engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (no cached spare; state is the engine alone).
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Uniform integer in [lo, hi], inclusive.
    int64_t uniform_int(int64_t lo, int64_t hi) {
        if (hi < lo) throw std::invalid_argument("rng: empty integer range");
        const uint64_t span = uint64_t(hi - lo) + 1;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return lo + int64_t(v % span);
    }

    std::string state() const {
        std::ostringstream os;
        os << engine_;
        return os.str();
    }

    void set_state(const std::string& s) {
        std::istringstream is(s);
        is >> engine_;
        if (is.fail()) throw std::invalid_argument("rng: malformed state string");
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace logdef
