#include "heatctl/rng.hpp"

namespace heatctl {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view component) {
    // FNV-1a over the tag, mixed with the root through splitmix64.
    std::uint64_t h = 14695981039346656037ull;
    for (char c : component) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    std::uint64_t state = root ^ h;
    return splitmix64(state);
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view component, std::uint64_t index) {
    std::uint64_t state = derive_seed(root, component) ^ (index * 0x9e3779b97f4a7c15ull);
    return splitmix64(state);
}

}  // namespace heatctl
