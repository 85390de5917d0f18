#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace segbias {

std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t fnv1a64(std::string_view text, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

/// Determinism contract for all randomized manipulations: every video gets a
/// sub-seed derived from (master_seed, video_id) only, so per-video work can
/// run in any order or in parallel without changing outputs.
struct SeedSpec {
    std::uint64_t master_seed = 0;

    std::uint64_t sub_seed(std::string_view video_id) const {
        return splitmix64(fnv1a64(video_id, splitmix64(master_seed)));
    }
};

/// mt19937_64 plus hand-rolled samplers. The standard distributions are
/// implementation-defined, so every draw here is spelled out to keep outputs
/// identical across compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t index(std::uint64_t n);

    /// Uniform double in [0, 1) with 53 random bits.
    double unit();

    /// Box-Muller normal draw.
    double normal(double mean, double sigma);

    /// Fisher-Yates using index(); identity permutation when n < 2.
    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::uint64_t i = items.size(); i > 1; --i) {
            std::uint64_t j = index(i);
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace segbias
