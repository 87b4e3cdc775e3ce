#include "ringjsa/rng.hpp"

namespace ringjsa {

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t key, std::uint64_t stream)
    : key_(mix64(key ^ mix64(stream + 0x632be59bd9b4e019ULL)))
{
}

CounterRng::result_type CounterRng::operator()()
{
    return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
}

std::uint64_t fnv1a(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_stream(std::uint64_t seed, std::string_view label)
{
    return mix64(seed ^ fnv1a(label));
}

}  // namespace ringjsa
