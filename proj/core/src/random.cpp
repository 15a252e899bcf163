#include "jitcluster/random.hpp"

namespace jitcluster {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = kFnvOffset;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= kFnvPrime;
    }
    return h;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view stream_label, std::uint64_t index) {
    const std::uint64_t stream = splitmix64(master_seed ^ splitmix64(fnv1a(stream_label) + kGolden));
    return splitmix64(stream + (index + 1) * kGolden);
}

}  // namespace jitcluster
