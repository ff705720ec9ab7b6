#include "nkamg/rng.hpp"

namespace nkamg {

Vector random_vector(std::size_t n, std::uint64_t seed) {
    Lcg rng(seed);
    Vector v(n);
    for (double& x : v) x = rng.symmetric();
    return v;
}

} // namespace nkamg
