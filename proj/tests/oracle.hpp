#pragma once

// Exhaustive alignment enumeration used as an independent check on the DP
// engine. Walks every monotone path through the edit lattice, tracking gap
// runs explicitly; no memoization, no score matrices. Exponential, so only
// for tiny inputs.

#include <cstdint>
#include <string_view>

#include "malign/align.hpp"

namespace oracle {

inline int64_t sub_score(char x, char y, const malign::ScoringParams& p) {
    return x == y ? p.match : p.mismatch;
}

namespace detail {

// state: 0 = last column was a match/mismatch (or start), 1 = open gap in a,
// 2 = open gap in b.
inline int64_t best_global(std::string_view a, std::string_view b,
                           const malign::ScoringParams& p, size_t i, size_t j, int state) {
    if (i == a.size() && j == b.size()) return 0;
    int64_t best = INT64_MIN / 4;
    if (i < a.size() && j < b.size()) {
        const int64_t s = sub_score(a[i], b[j], p) + best_global(a, b, p, i + 1, j + 1, 0);
        best = std::max(best, s);
    }
    if (j < b.size()) {
        const int64_t cost = (state == 1) ? p.gap_extend : p.gap_open + p.gap_extend;
        best = std::max(best, cost + best_global(a, b, p, i, j + 1, 1));
    }
    if (i < a.size()) {
        const int64_t cost = (state == 2) ? p.gap_extend : p.gap_open + p.gap_extend;
        best = std::max(best, cost + best_global(a, b, p, i + 1, j, 2));
    }
    return best;
}

inline void local_walk(std::string_view a, std::string_view b, const malign::ScoringParams& p,
                       size_t i, size_t j, int state, int64_t run, int64_t& best) {
    if (i < a.size() && j < b.size()) {
        const int64_t s = run + sub_score(a[i], b[j], p);
        best = std::max(best, s);  // a local alignment may end on any column pair
        local_walk(a, b, p, i + 1, j + 1, 0, s, best);
    }
    if (j < b.size()) {
        const int64_t cost = (state == 1) ? p.gap_extend : p.gap_open + p.gap_extend;
        local_walk(a, b, p, i, j + 1, 1, run + cost, best);
    }
    if (i < a.size()) {
        const int64_t cost = (state == 2) ? p.gap_extend : p.gap_open + p.gap_extend;
        local_walk(a, b, p, i + 1, j, 2, run + cost, best);
    }
}

}  // namespace detail

inline int64_t global_score(std::string_view a, std::string_view b,
                            const malign::ScoringParams& p) {
    return detail::best_global(a, b, p, 0, 0, 0);
}

// Best local score: max over all start column pairs of all path extensions,
// scored only at prefixes ending in a column pair. 0 when nothing positive.
inline int64_t local_score(std::string_view a, std::string_view b,
                           const malign::ScoringParams& p) {
    int64_t best = 0;
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) {
            const int64_t s = sub_score(a[i], b[j], p);
            best = std::max(best, s);
            detail::local_walk(a, b, p, i + 1, j + 1, 0, s, best);
        }
    return best;
}

// Recompute an alignment's score from its gapped strings, with the same gap
// accounting the params describe. Returns INT64_MIN on malformed input.
inline int64_t rescore(std::string_view a_aligned, std::string_view b_aligned,
                       const malign::ScoringParams& p) {
    if (a_aligned.size() != b_aligned.size()) return INT64_MIN;
    int64_t score = 0;
    int state = 0;
    for (size_t i = 0; i < a_aligned.size(); ++i) {
        const char x = a_aligned[i], y = b_aligned[i];
        if (x == '-' && y == '-') return INT64_MIN;
        if (x == '-') {
            score += (state == 1) ? p.gap_extend : p.gap_open + p.gap_extend;
            state = 1;
        } else if (y == '-') {
            score += (state == 2) ? p.gap_extend : p.gap_open + p.gap_extend;
            state = 2;
        } else {
            score += sub_score(x, y, p);
            state = 0;
        }
    }
    return score;
}

}  // namespace oracle
