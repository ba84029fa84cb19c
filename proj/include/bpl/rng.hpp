#pragma once

#include <cstdint>

namespace bpl {

// Counter-based stream: the state is a pure function of the key, so a draw for
// (seed, a, b) does not depend on which thread asks or in what order.
class KeyedRng {
public:
    KeyedRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

    std::uint64_t next();
    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace bpl
