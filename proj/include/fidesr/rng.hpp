#ifndef FIDESR_RNG_HPP
#define FIDESR_RNG_HPP

#include <cstdint>
#include <random>

namespace fidesr {

/// Seeded generator with portable output. The mt19937 engine sequence is
/// fixed by the standard; the float/gaussian mappings below are written out
/// so results do not depend on the standard library's distribution objects.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(static_cast<std::uint32_t>(seed)) {}

    std::uint32_t next_u32() { return engine_(); }

    /// Uniform in [0, 1) with 24 bits of precision.
    float uniform() { return static_cast<float>(engine_() >> 8) * (1.0f / 16777216.0f); }

    float uniform(float lo, float hi) { return lo + uniform() * (hi - lo); }

    /// Standard normal via Box-Muller.
    float gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        float u1 = uniform();
        while (u1 <= 1.1754944e-38f) u1 = uniform();  // avoid log(0)
        const float u2 = uniform();
        const float r = std::sqrt(-2.0f * std::log(u1));
        const float theta = 6.28318530717958647692f * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937 engine_;
    bool have_spare_ = false;
    float spare_ = 0.0f;
};

}  // namespace fidesr

#endif
