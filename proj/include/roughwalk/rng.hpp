#pragma once

// Counter-based seeding utilities. Replica streams are derived as
// mix(base_seed, replica_index) so results do not depend on how replicas are
// distributed over workers; environment bond weights hash the bond coordinates
// into the stream so the same seed yields the same environment regardless of
// visit order.

#include <cmath>
#include <cstdint>

namespace roughwalk {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix64(uint64_t a, uint64_t b) { return splitmix64(a ^ (0x632be59bd9b4e019ULL + b)); }

inline double u01_from_bits(uint64_t h) {
    double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    if (u <= 0.0) u = 0x1.0p-53;
    if (u >= 1.0) u = 1.0 - 0x1.0p-53;
    return u;
}

// Sequential stream built on the splitmix64 mixer.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(splitmix64(seed ^ 0x243f6a8885a308d3ULL)) {}

    uint64_t u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    double u01() { return u01_from_bits(u64()); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = u01();
        const double u2 = u01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Exponential waiting time with the given rate.
    double exponential(double rate) { return -std::log(u01()) / rate; }

  private:
    uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline uint64_t replica_seed(uint64_t base_seed, uint64_t replica_index) {
    return mix64(base_seed, replica_index);
}

}  // namespace roughwalk
