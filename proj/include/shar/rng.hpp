#pragma once

// Seeded random streams. A master seed plus a path of integers (replicate
// index, group, purpose tag) names an independent, reproducible stream, so
// results never depend on scheduling order.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace shar::rng {

using Engine = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix(seed);
    for (std::uint64_t p : path) h = mix(h ^ mix(p + 0x632be59bd9b4e019ULL));
    return h;
}

inline Engine substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    return Engine(derive(seed, path));
}

/// Stream purpose tags.
enum Tag : std::uint64_t {
    tag_bootstrap = 0xb0, tag_simulation = 0x51,
};

/// Mean-zero, unit-variance multiplier laws.
enum class InnovationLaw { Normal, Rademacher };

inline const char* to_string(InnovationLaw law) {
    return law == InnovationLaw::Normal ? "normal" : "rademacher";
}

class InnovationSampler {
public:
    explicit InnovationSampler(InnovationLaw law) : law_(law) {}

    double operator()(Engine& eng) {
        if (law_ == InnovationLaw::Normal) return normal_(eng);
        return (eng() >> 63) ? 1.0 : -1.0;
    }

    InnovationLaw law() const { return law_; }

private:
    InnovationLaw law_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace shar::rng
