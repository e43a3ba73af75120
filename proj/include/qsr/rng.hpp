#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>

namespace qsr::rng {

// Deterministic random stream. mt19937_64 is bit-exact across platforms and
// all value extraction below bypasses the (implementation-defined) standard
// distributions, so a seed pins every result of the toolkit.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller; spare value cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = uniform01();
        double v = uniform01();
        // u = 0 would give log(0)
        double r = std::sqrt(-2.0 * std::log(1.0 - u));
        double theta = 2.0 * 3.14159265358979323846 * v;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    std::complex<double> complex_normal() {
        double re = normal();
        double im = normal();
        return {re * 0.7071067811865476, im * 0.7071067811865476};
    }

    // Uniform in {0, ..., n-1}. Modulo bias is < 2^-53 for the n used here.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(engine_() % n);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Independent per-item seeds from one base seed (splitmix64 finalizer).
inline std::uint64_t derive(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace qsr::rng
