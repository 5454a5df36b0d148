#ifndef ELLIPVMO_RNG_HPP
#define ELLIPVMO_RNG_HPP

#include <cstdint>
#include <random>

namespace ellipvmo {

/** Seeded generator with a fixed bits-to-double mapping, so draws are
 * identical across standard libraries (uniform_real_distribution is not
 * pinned by the standard).
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Uniform in {-1, +1}.
    double sign() { return (gen_() & 1u) ? 1.0 : -1.0; }

  private:
    std::mt19937_64 gen_;
};

/// Stateless 64-bit mix, used to derive independent sub-seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace ellipvmo

#endif
