#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace smab {

// Deterministic seed mixing. Streams for different components ("graph",
// "rewards", "player", ...) are derived from one master seed by hashing a
// label, so replacing one component's draws never shifts another stream.
constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t master, std::string_view label) {
    return splitmix64(master ^ fnv1a64(label));
}

// mt19937_64 wrapper producing canonical doubles. The standard fixes the
// mt19937_64 output sequence, and (x >> 11) * 2^-53 is bit-portable, so the
// same seed gives the same draws on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    static Rng stream(std::uint64_t master, std::string_view label) {
        return Rng(stream_seed(master, label));
    }

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    std::uint64_t next_u64() { return gen_(); }

  private:
    std::mt19937_64 gen_;
};

}  // namespace smab
