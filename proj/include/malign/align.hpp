#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "malign/common.hpp"

namespace malign {

struct ScoringParams {
    int32_t match = 1;
    int32_t mismatch = -1;
    int32_t gap_open = -2;    // charged once per gap run, on top of per-base extend
    int32_t gap_extend = -1;
    void validate() const;
};

struct Interval {
    int64_t begin = 0;
    int64_t end = 0;
    int64_t length() const { return end - begin; }
};

struct PairwiseAlignment {
    Interval a, b;
    std::string a_aligned, b_aligned;  // equal length, over {A,C,G,T,-}
    int64_t score = 0;
};

inline constexpr size_t kDefaultCellBudget = size_t{64} << 20;

// Optimal end-to-end alignment. Affine gaps; deterministic tie-breaking
// (match/mismatch preferred over gap-in-a over gap-in-b). |a|*|b| beyond
// the cell budget throws budget_error (use the seeded path instead).
PairwiseAlignment global_align(std::string_view a, std::string_view b, const ScoringParams& params,
                               size_t cell_budget = kDefaultCellBudget);

// All mutually non-overlapping (in a) local alignments with score >=
// min_score, by repeated best-alignment extraction; each is individually
// optimal over the region of a it was extracted from.
std::vector<PairwiseAlignment> local_align(std::string_view a, std::string_view b,
                                           const ScoringParams& params, int64_t min_score,
                                           size_t cell_budget = kDefaultCellBudget);

// Global alignment restricted to the diagonal corridor dlo <= j - i <= dhi
// (i indexes a, j indexes b). The corridor must contain both matrix corners.
PairwiseAlignment banded_global_align(std::string_view a, std::string_view b,
                                      const ScoringParams& params, int64_t dlo, int64_t dhi,
                                      size_t cell_budget = kDefaultCellBudget);

// Best single local alignment inside [a_begin,a_end) x [b_begin,b_end)
// restricted to a diagonal corridor (sub-box coordinates are mapped back to
// the full sequences). Returns score 0 and empty strings when nothing
// positive exists.
PairwiseAlignment banded_local_align(std::string_view a, std::string_view b,
                                     const ScoringParams& params, Interval a_box, Interval b_box,
                                     int64_t dlo, int64_t dhi,
                                     size_t cell_budget = kDefaultCellBudget);

}  // namespace malign
