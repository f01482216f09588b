#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "malign/align.hpp"

namespace malign {

struct Anchor {
    int64_t a_pos = 0;
    int64_t b_pos = 0;
    int64_t len = 0;
    int64_t diag() const { return b_pos - a_pos; }
    int64_t a_end() const { return a_pos + len; }
    int64_t b_end() const { return b_pos + len; }
};

struct Chain {
    std::vector<Anchor> anchors;  // ascending in both coordinates
    int64_t anchored = 0;         // total anchor bases (no double counting)
    Interval a, b;                // bounding intervals
};

inline constexpr int kDefaultSeedK = 15;
inline constexpr int64_t kDefaultChainGap = 100;
inline constexpr int64_t kDefaultBand = 32;
inline constexpr size_t kDefaultMaxOcc = 64;

// Sorted (packed k-mer, position) list for one sequence. Building it costs
// a sort; callers aligning one sequence against many should build it once.
struct KmerIndex {
    int k = 0;
    std::vector<std::pair<uint64_t, int64_t>> kmers;  // sorted by (key, pos)
};
KmerIndex index_kmers(std::string_view s, int k);

// Exact k-mer matches between two indexed sequences, sorted by
// (a_pos, b_pos). k-mers occurring more than max_occ times on either side
// are dropped as repeats; max_occ 0 lifts the cap. Overlapping matches on
// one diagonal are merged into maximal runs.
std::vector<Anchor> anchors_between(const KmerIndex& a, const KmerIndex& b,
                                    size_t max_occ = kDefaultMaxOcc);

std::vector<Anchor> find_anchors(std::string_view a, std::string_view b, int k,
                                 size_t max_occ = kDefaultMaxOcc);

// Groups anchors into co-linear chains: anchor starts strictly increase on
// both coordinates along a chain, consecutive anchors are separated by at
// most max_gap on both sides, and bases covered twice by overlapping anchors
// count once. Chains are extracted best-first by anchored length; anchors
// falling inside an extracted chain's a-span are retired with it (the b-span
// stays open so repeats in a each get a chain). Chains with anchored <
// min_anchored are dropped. Sorted by descending anchored.
std::vector<Chain> chain_anchors(std::vector<Anchor> anchors, int64_t max_gap = kDefaultChainGap,
                                 int64_t min_anchored = 1);

// Local alignments recovered around anchor chains: each chain's bounding box
// (padded by 2k + band) is searched with a banded local DP, best chains
// first; results claim their span of a, and later chains overlapping a
// claimed span are skipped. Equivalent to local_align on inputs whose
// similar regions are long enough to seed, at a fraction of the cost.
std::vector<PairwiseAlignment> seeded_local_align(std::string_view a, std::string_view b,
                                                  const ScoringParams& params,
                                                  int k = kDefaultSeedK, int64_t min_score = 30,
                                                  int64_t band = kDefaultBand,
                                                  size_t cell_budget = kDefaultCellBudget);

}  // namespace malign
