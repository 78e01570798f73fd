#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace lira {

/// Deterministic RNG: mt19937_64 core (engine output is pinned by the standard)
/// with explicit uniform/normal transforms so streams are bit-reproducible
/// independent of the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : seed_(seed), gen_(seed), has_spare_(false), spare_(0.0) {}

    uint64_t next_u64() { return gen_(); }
    double uniform();                       // [0, 1)
    double uniform(double lo, double hi);
    double normal();                        // standard normal, Marsaglia polar
    double normal(double mu, double sigma) { return mu + sigma * normal(); }
    int uniform_int(int n);                 // [0, n)
    void shuffle(std::vector<int>& idx);    // Fisher-Yates

    /// Independent deterministic substream (same base seed + id -> same stream).
    Rng fork(uint64_t stream_id) const;

private:
    uint64_t seed_;
    std::mt19937_64 gen_;
    bool has_spare_;
    double spare_;
};

uint64_t splitmix64(uint64_t x);

} // namespace lira
