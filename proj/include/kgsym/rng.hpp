#ifndef KGSYM_RNG_HPP
#define KGSYM_RNG_HPP

#include <cstdint>
#include <random>
#include <string>

namespace kgsym {

/// Deterministic sampling. All randomness in the engine flows from a single
/// run seed; sub-streams are derived from the seed and a tag so that check
/// ordering never perturbs results.
class SeededRng {
  public:
    explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) {
        // Scale from raw bits; avoids distribution implementation differences.
        double u = static_cast<double>(gen_()) / 18446744073709551616.0;  // 2^64
        return lo + (hi - lo) * u;
    }

    std::uint64_t next() { return gen_(); }

  private:
    std::mt19937_64 gen_;
};

inline std::uint64_t sub_seed(std::uint64_t seed, const std::string& tag) {
    // FNV-1a over the tag, mixed with the run seed.
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    h ^= seed + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

}  // namespace kgsym

#endif
