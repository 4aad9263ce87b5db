#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace cmasao {

/// Deterministic 64-bit-seedable random stream. The uniform and normal
/// draws are produced in library code (not std::*_distribution) so that
/// a given seed yields the same sequence on every platform.
class Rng {
public:
    Rng() : Rng(0) {}
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    /// Standard normal draw, Marsaglia polar method with cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    friend bool operator==(const Rng& a, const Rng& b) {
        return a.gen_ == b.gen_ && a.has_spare_ == b.has_spare_ &&
               (!a.has_spare_ || a.spare_ == b.spare_);
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// splitmix64 finalizer; stateless bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Per-trial seed derivation. Each (function, dim, trial) gets an
/// independent stream from the base seed; adding a function to a sweep
/// never shifts the seeds of the others.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view function,
                                 int dim, int trial) {
    std::uint64_t s = mix64(base ^ fnv1a(function));
    s = mix64(s ^ static_cast<std::uint64_t>(dim));
    s = mix64(s ^ static_cast<std::uint64_t>(trial));
    return s;
}

/// Independent sub-stream of a run seed (e.g. sampling vs noise).
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream_id) {
    return mix64(mix64(seed) ^ stream_id);
}

} // namespace cmasao
