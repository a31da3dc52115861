#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gsm {

// Seeding spec for one reproducible random stream. Identical
// (master_seed, stream_id) pairs yield bit-identical draws; distinct
// stream_ids give statistically independent streams, so Monte Carlo
// loops can hand one stream per trial and reduce in index order
// regardless of how trials are scheduled across workers.
struct RngStreamSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

// SplitMix64 finalizer; used to mix seeds and derive child streams.
std::uint64_t mix64(std::uint64_t x);

// Derives an independent child stream, e.g. one per trial or purpose tag.
RngStreamSpec substream(const RngStreamSpec& s, std::uint64_t tag);

// Engine seeded from the stream spec.
std::mt19937_64 make_rng(const RngStreamSpec& s);

// Fills out with i.i.d. N(0,1) draws.
void fill_standard_normal(std::mt19937_64& rng, std::vector<double>& out);

}  // namespace gsm
