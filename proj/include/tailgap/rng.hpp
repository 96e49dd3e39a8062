#ifndef TAILGAP_RNG_HPP
#define TAILGAP_RNG_HPP

#include <cstdint>

namespace tailgap::mc {

// Counter-based stream: draw i of stream s under seed k is a fixed
// mixing of (k, s, i), so streams split cleanly by rep index and replay
// identically on any platform.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_index)
        : key_(mix(mix(seed + 0x9E3779B97F4A7C15ULL) ^
                   mix(stream_index + 0xD1B54A32D192ED03ULL))) {}

    std::uint64_t next_u64() {
        counter_ += 0x9E3779B97F4A7C15ULL;
        return mix(key_ ^ counter_);
    }

    // Uniform on [0, 1), 53 mantissa bits.
    double next_uniform01() {
        return (double)(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace tailgap::mc

#endif
