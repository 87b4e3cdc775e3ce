#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace ringjsa {

/// SplitMix64 run as a counter-based generator: output n is a bijective mix of
/// (key, n). Every grid point, trial and file draws from its own stream, so
/// results do not depend on evaluation order.
class CounterRng {
public:
    using result_type = std::uint64_t;
    static constexpr const char* kName = "splitmix64-counter";

    CounterRng(std::uint64_t key, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

/// Substream key for a labelled purpose ("i_res", "fringe", "trial", ...)
/// under a top-level seed.
std::uint64_t derive_stream(std::uint64_t seed, std::string_view label);

}  // namespace ringjsa
