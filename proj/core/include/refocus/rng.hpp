#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace refocus {

// splitmix64: stateless stream derivation used to give every Monte Carlo sample
// an independent, platform-stable seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t s = base;
    std::uint64_t a = splitmix64(s);
    s = a ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    return splitmix64(s);
}

// Gaussian stream with a fully specified algorithm (mt19937_64 + Box-Muller);
// std::normal_distribution is not bit-portable across standard libraries.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {
        // (0, 1]: never returns 0, so log() below is safe
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double c = std::cos(2.0 * 3.14159265358979323846 * u2);
        double s = std::sin(2.0 * 3.14159265358979323846 * u2);
        spare_ = r * s;
        have_spare_ = true;
        return r * c;
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

std::vector<double> standard_normal_vector(std::uint64_t seed, std::size_t n);

}
