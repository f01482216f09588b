#include "malign/seed.hpp"

#include <algorithm>

#include "malign/common.hpp"

namespace malign {
namespace {

constexpr int kMinK = 8;
constexpr int kMaxK = 31;  // 2k bits must fit a 64-bit key

inline int base_code(char c) {
    switch (c) {
        case 'A': return 0;
        case 'C': return 1;
        case 'G': return 2;
        case 'T': return 3;
        default: return -1;
    }
}

void merge_same_diagonal(std::vector<Anchor>& anchors) {
    std::sort(anchors.begin(), anchors.end(), [](const Anchor& x, const Anchor& y) {
        if (x.diag() != y.diag()) return x.diag() < y.diag();
        return x.a_pos < y.a_pos;
    });
    std::vector<Anchor> merged;
    for (const Anchor& an : anchors) {
        if (!merged.empty() && merged.back().diag() == an.diag() &&
            an.a_pos <= merged.back().a_end()) {
            Anchor& prev = merged.back();
            prev.len = std::max(prev.len, an.a_end() - prev.a_pos);
        } else {
            merged.push_back(an);
        }
    }
    anchors = std::move(merged);
}

struct ChainDp {
    std::vector<int64_t> score;
    std::vector<int64_t> parent;
};

// Window-limited co-linear chaining over anchors sorted by (a_pos, b_pos).
ChainDp chain_dp(const std::vector<Anchor>& anchors, const std::vector<char>& used,
                 int64_t max_gap) {
    const size_t n = anchors.size();
    int64_t max_len = 0;
    for (const Anchor& an : anchors) max_len = std::max(max_len, an.len);

    ChainDp dp;
    dp.score.assign(n, 0);
    dp.parent.assign(n, -1);
    for (size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        const Anchor& ai = anchors[i];
        int64_t best = ai.len, best_j = -1;
        // Any viable predecessor ends within max_gap of our start, so its
        // own start is at most max_gap + max_len behind.
        const int64_t lo = ai.a_pos - max_gap - max_len;
        for (size_t j = i; j-- > 0;) {
            const Anchor& aj = anchors[j];
            if (aj.a_pos < lo) break;
            if (used[j]) continue;
            // Starts must advance on both coordinates; ends may overlap
            // (chance extensions blur anchor boundaries). Overlapped bases
            // are trimmed from the contribution so anchored bases are never
            // counted twice.
            if (aj.a_pos >= ai.a_pos || aj.b_pos >= ai.b_pos) continue;
            if (ai.a_pos - aj.a_end() > max_gap || ai.b_pos - aj.b_end() > max_gap) continue;
            const int64_t overlap =
                std::max<int64_t>({0, aj.a_end() - ai.a_pos, aj.b_end() - ai.b_pos});
            const int64_t cand = dp.score[j] + std::max<int64_t>(0, ai.len - overlap);
            if (cand > best) {
                best = cand;
                best_j = int64_t(j);
            }
        }
        dp.score[i] = best;
        dp.parent[i] = best_j;
    }
    return dp;
}

bool overlaps(const Interval& x, int64_t begin, int64_t end) {
    return begin < x.end && x.begin < end;
}

}  // namespace

KmerIndex index_kmers(std::string_view s, int k) {
    if (k < kMinK || k > kMaxK)
        throw error("seed length must be in [" + std::to_string(kMinK) + ", " +
                    std::to_string(kMaxK) + "]");
    KmerIndex idx;
    idx.k = k;
    if (int64_t(s.size()) < k) return idx;
    idx.kmers.reserve(s.size() - size_t(k) + 1);
    const uint64_t mask = (uint64_t{1} << (2 * k)) - 1;
    uint64_t key = 0;
    int run = 0;  // consecutive valid bases ending here
    for (size_t i = 0; i < s.size(); ++i) {
        const int code = base_code(s[i]);
        if (code < 0) {
            run = 0;
            continue;
        }
        key = ((key << 2) | uint64_t(code)) & mask;
        if (++run >= k) idx.kmers.emplace_back(key, int64_t(i) - k + 1);
    }
    std::sort(idx.kmers.begin(), idx.kmers.end());
    return idx;
}

std::vector<Anchor> anchors_between(const KmerIndex& a, const KmerIndex& b, size_t max_occ) {
    if (a.k != b.k || a.k == 0) throw error("k-mer indexes disagree on k");
    const int k = a.k;
    std::vector<Anchor> anchors;

    // Both lists are sorted by key: a linear merge-join finds every shared
    // k-mer; repeat-heavy keys are skipped before their cross product blows up.
    size_t i = 0, j = 0;
    while (i < a.kmers.size() && j < b.kmers.size()) {
        const uint64_t ka = a.kmers[i].first, kb = b.kmers[j].first;
        if (ka < kb) {
            ++i;
            continue;
        }
        if (kb < ka) {
            ++j;
            continue;
        }
        size_t ie = i, je = j;
        while (ie < a.kmers.size() && a.kmers[ie].first == ka) ++ie;
        while (je < b.kmers.size() && b.kmers[je].first == ka) ++je;
        if (max_occ == 0 || (ie - i <= max_occ && je - j <= max_occ)) {
            for (size_t x = i; x < ie; ++x)
                for (size_t y = j; y < je; ++y)
                    anchors.push_back({a.kmers[x].second, b.kmers[y].second, k});
        }
        i = ie;
        j = je;
    }

    merge_same_diagonal(anchors);
    std::sort(anchors.begin(), anchors.end(), [](const Anchor& x, const Anchor& y) {
        if (x.a_pos != y.a_pos) return x.a_pos < y.a_pos;
        return x.b_pos < y.b_pos;
    });
    return anchors;
}

std::vector<Anchor> find_anchors(std::string_view a, std::string_view b, int k, size_t max_occ) {
    return anchors_between(index_kmers(a, k), index_kmers(b, k), max_occ);
}

std::vector<Chain> chain_anchors(std::vector<Anchor> anchors, int64_t max_gap,
                                 int64_t min_anchored) {
    if (max_gap < 0) throw error("max_gap must be non-negative");
    merge_same_diagonal(anchors);
    std::sort(anchors.begin(), anchors.end(), [](const Anchor& x, const Anchor& y) {
        if (x.a_pos != y.a_pos) return x.a_pos < y.a_pos;
        if (x.b_pos != y.b_pos) return x.b_pos < y.b_pos;
        return x.len < y.len;
    });

    std::vector<Chain> chains;
    std::vector<char> used(anchors.size(), 0);
    min_anchored = std::max<int64_t>(min_anchored, 1);

    while (true) {
        // Chains are extracted best-first; retiring anchors invalidates
        // downstream scores, so the DP is rebuilt each round. Rounds are as
        // few as the chains that survive, which keeps this cheap.
        const ChainDp dp = chain_dp(anchors, used, max_gap);
        int64_t best = 0, best_i = -1;
        for (size_t i = 0; i < anchors.size(); ++i) {
            if (used[i]) continue;
            if (dp.score[i] > best) {
                best = dp.score[i];
                best_i = int64_t(i);
            }
        }
        if (best_i < 0 || best < min_anchored) break;

        Chain chain;
        chain.anchored = best;
        for (int64_t i = best_i; i >= 0; i = dp.parent[i]) {
            chain.anchors.push_back(anchors[size_t(i)]);
            used[size_t(i)] = 1;
        }
        std::reverse(chain.anchors.begin(), chain.anchors.end());
        chain.a = {chain.anchors.front().a_pos, chain.anchors.front().a_end()};
        chain.b = {chain.anchors.front().b_pos, chain.anchors.front().b_end()};
        for (const Anchor& an : chain.anchors) {
            chain.a.end = std::max(chain.a.end, an.a_end());
            chain.b.end = std::max(chain.b.end, an.b_end());
        }

        // Leftover anchors inside the claimed a-span are shifted echoes of
        // the same locus; retire them so they cannot seed spurious chains.
        // The b-span stays open: a region of b may legitimately match
        // several places in a, and each match deserves its own chain.
        for (size_t i = 0; i < anchors.size(); ++i) {
            if (used[i]) continue;
            if (overlaps(chain.a, anchors[i].a_pos, anchors[i].a_end())) used[i] = 1;
        }
        chains.push_back(std::move(chain));
    }

    std::sort(chains.begin(), chains.end(), [](const Chain& x, const Chain& y) {
        if (x.anchored != y.anchored) return x.anchored > y.anchored;
        if (x.a.begin != y.a.begin) return x.a.begin < y.a.begin;
        return x.b.begin < y.b.begin;
    });
    return chains;
}

std::vector<PairwiseAlignment> seeded_local_align(std::string_view a, std::string_view b,
                                                  const ScoringParams& params, int k,
                                                  int64_t min_score, int64_t band,
                                                  size_t cell_budget) {
    params.validate();
    if (band < 1) throw error("band must be positive");
    if (min_score <= 0) throw error("min_score must be positive");

    const auto anchors = find_anchors(a, b, k);
    const auto chains = chain_anchors(anchors, kDefaultChainGap, k);

    const int64_t pad = 2 * int64_t(k) + band;
    std::vector<PairwiseAlignment> out;
    std::vector<Interval> claimed;

    for (const Chain& chain : chains) {
        Interval box_a{std::max<int64_t>(0, chain.a.begin - pad),
                       std::min<int64_t>(int64_t(a.size()), chain.a.end + pad)};
        Interval box_b{std::max<int64_t>(0, chain.b.begin - pad),
                       std::min<int64_t>(int64_t(b.size()), chain.b.end + pad)};

        int64_t dlo = chain.anchors.front().diag(), dhi = dlo;
        for (const Anchor& an : chain.anchors) {
            dlo = std::min(dlo, an.diag());
            dhi = std::max(dhi, an.diag());
        }
        // Shift into box coordinates and leave room for banded wander.
        const int64_t shift = box_a.begin - box_b.begin;
        dlo += shift - band;
        dhi += shift + band;

        PairwiseAlignment al = banded_local_align(a, b, params, box_a, box_b, dlo, dhi, cell_budget);
        if (al.score < min_score) continue;
        bool taken = false;
        for (const Interval& cl : claimed) {
            if (overlaps(cl, al.a.begin, al.a.end)) {
                taken = true;
                break;
            }
        }
        if (taken) continue;
        claimed.push_back(al.a);
        out.push_back(std::move(al));
    }

    std::sort(out.begin(), out.end(), [](const PairwiseAlignment& x, const PairwiseAlignment& y) {
        if (x.score != y.score) return x.score > y.score;
        if (x.a.begin != y.a.begin) return x.a.begin < y.a.begin;
        return x.b.begin < y.b.begin;
    });
    return out;
}

}  // namespace malign
