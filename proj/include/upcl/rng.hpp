#ifndef UPCL_RNG_HPP
#define UPCL_RNG_HPP

#include <cstdint>
#include <random>

namespace upcl {

// splitmix64 finalizer; decorrelates nearby inputs so that derived seeds for
// consecutive replication indices give independent-looking streams.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Child seed for work item `index` under master `seed`.  Every stochastic
// operation takes an explicit seed derived this way, which keeps results
// independent of thread scheduling.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 1));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

} // namespace upcl

#endif
