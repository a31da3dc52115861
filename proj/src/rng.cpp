#include "gsm/rng.hpp"

namespace gsm {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RngStreamSpec substream(const RngStreamSpec& s, std::uint64_t tag) {
    return RngStreamSpec{mix64(s.master_seed ^ mix64(s.stream_id)), tag};
}

std::mt19937_64 make_rng(const RngStreamSpec& s) {
    const std::uint64_t seed = mix64(mix64(s.master_seed) ^ mix64(s.stream_id + 0x632BE59BD9B4E019ULL));
    return std::mt19937_64(seed);
}

void fill_standard_normal(std::mt19937_64& rng, std::vector<double>& out) {
    std::normal_distribution<double> nd(0.0, 1.0);
    for (double& v : out) v = nd(rng);
}

}  // namespace gsm
