#include "refocus/rng.hpp"

namespace refocus {

std::vector<double> standard_normal_vector(std::uint64_t seed, std::size_t n) {
    NormalStream stream(seed);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = stream.normal();
    return out;
}

}
