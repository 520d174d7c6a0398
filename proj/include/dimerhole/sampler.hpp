#pragma once

#include <cstdint>
#include <vector>

#include "dimerhole/kasteleyn.hpp"

namespace dimerhole {

std::uint64_t splitmix64(std::uint64_t x);

// Per-sample seed derived from the master seed and the sample index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Uniform tiling by sequential conditioning: whites in row-major order, each
// matched to a neighbour with its conditional edge probability. The inverse
// is updated in panels of whites with a block Schur complement. Throws
// kUntileable.
Tiling sample_exact(const KasteleynSystem& system, std::uint64_t seed);

// Same distribution and the same random draws as sample_exact, using one
// dense rank-one update per domino. Slow; kept as a test oracle.
Tiling sample_exact_reference(const KasteleynSystem& system, std::uint64_t seed);

// Samples index..index+count-1 with derived seeds, spread over `threads`
// workers; the result does not depend on `threads`.
std::vector<Tiling> sample_many(const KasteleynSystem& system,
                                std::uint64_t master_seed, std::size_t first,
                                std::size_t count, int threads);

}  // namespace dimerhole
