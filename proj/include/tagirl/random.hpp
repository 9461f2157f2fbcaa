#pragma once

#include <cstdint>
#include <random>

namespace tagirl {

using Rng = std::mt19937_64;

/// Independent, reproducible child seed for stream `stream` of `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(master),
                      static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace tagirl
