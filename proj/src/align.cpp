#include "malign/align.hpp"

#include <algorithm>
#include <limits>

namespace malign {
namespace {

constexpr int32_t kNegInf = std::numeric_limits<int32_t>::min() / 2;

// Cell layers: 0 = column (a_i, b_j), 1 = column (-, b_j), 2 = column (a_i, -).
enum : uint8_t { kM = 0, kGapA = 1, kGapB = 2 };

// Packed per-cell traceback. Two bits per layer hold the predecessor layer
// + 1; value 0 marks "alignment starts here" (matrix corner, or a fresh
// local start for the M layer).
inline uint8_t pack_tb(uint8_t m_from, uint8_t ga_from, uint8_t gb_from) {
    return uint8_t(m_from | (ga_from << 2) | (gb_from << 4));
}
inline uint8_t tb_from(uint8_t tb, uint8_t layer) { return (tb >> (2 * layer)) & 3u; }

struct Candidate {
    int32_t score = kNegInf;
    uint8_t from = 0;  // 0 = start, else predecessor layer + 1
};

// Keeps the first candidate on ties, so the argument order is the
// tie-breaking order.
inline Candidate best3(int32_t m, int32_t ga, int32_t gb) {
    Candidate c{m, uint8_t(kM + 1)};
    if (ga > c.score) c = Candidate{ga, uint8_t(kGapA + 1)};
    if (gb > c.score) c = Candidate{gb, uint8_t(kGapB + 1)};
    return c;
}

inline int32_t bump(int32_t v, int32_t delta) { return v == kNegInf ? kNegInf : v + delta; }

struct DpOutcome {
    int64_t score = 0;
    int64_t end_i = 0, end_j = 0;  // cell the best alignment ends in
    uint8_t end_layer = kM;
    int64_t dlo = 0, dhi = 0;      // clamped corridor the matrices were built for
    int64_t width = 0;             // row stride of tb
    std::vector<uint8_t> tb;       // (n+1) rows
};

inline int64_t row_base(int64_t i, int64_t dlo) { return std::max<int64_t>(0, i + dlo); }

// Affine-gap DP over the corridor dlo <= j - i <= dhi of the (|a|+1) x
// (|b|+1) matrix. Scores live in two rolling rows; the traceback matrix is
// the only full-size allocation. Cells outside the corridor act as -inf.
DpOutcome run_dp(std::string_view a, std::string_view b, const ScoringParams& p, bool local,
                 int64_t dlo, int64_t dhi, size_t cell_budget) {
    const int64_t n = int64_t(a.size());
    const int64_t m = int64_t(b.size());
    dlo = std::max(dlo, -n);
    dhi = std::min(dhi, m);
    if (dlo > dhi) throw error("alignment band is empty");
    const int64_t w = std::min(dhi - dlo + 1, m + 1);

    const size_t cells = size_t(n + 1) * size_t(w);
    if (cells > cell_budget)
        throw budget_error("alignment needs " + std::to_string(cells) + " cells, budget " +
                           std::to_string(cell_budget));

    DpOutcome out;
    out.dlo = dlo;
    out.dhi = dhi;
    out.width = w;
    out.tb.assign(cells, 0);

    std::vector<int32_t> prev(size_t(3) * w, kNegInf), cur(size_t(3) * w, kNegInf);
    auto lay = [&](std::vector<int32_t>& row, int layer) { return row.data() + size_t(layer) * w; };

    int64_t best_score = local ? 0 : kNegInf;
    int64_t best_i = 0, best_j = 0;
    uint8_t best_layer = kM;

    const int32_t open_ext = p.gap_open + p.gap_extend;

    for (int64_t i = 0; i <= n; ++i) {
        const int64_t jlo = std::max<int64_t>(0, i + dlo);
        const int64_t jhi = std::min<int64_t>(m, i + dhi);
        std::fill(cur.begin(), cur.end(), kNegInf);
        if (jlo > jhi) {
            std::swap(prev, cur);
            continue;
        }
        const int64_t base = row_base(i, dlo);
        const int64_t pbase = row_base(i - 1, dlo);
        const int64_t pjlo = std::max<int64_t>(0, (i - 1) + dlo);
        const int64_t pjhi = std::min<int64_t>(m, (i - 1) + dhi);
        uint8_t* tb_row = out.tb.data() + size_t(i) * w;

        for (int64_t j = jlo; j <= jhi; ++j) {
            const int64_t c = j - base;
            if (i == 0 && j == 0) {
                lay(cur, kM)[c] = 0;
                continue;
            }
            const bool has_diag = i > 0 && j > 0 && j - 1 >= pjlo && j - 1 <= pjhi;
            const bool has_up = i > 0 && j >= pjlo && j <= pjhi;
            const bool has_left = j - 1 >= jlo;
            const int64_t cd = j - 1 - pbase, cu = j - pbase, cl = c - 1;

            Candidate mc{kNegInf, 0}, gac{kNegInf, 0}, gbc{kNegInf, 0};
            if (has_diag) {
                const int32_t sub = (a[size_t(i - 1)] == b[size_t(j - 1)]) ? p.match : p.mismatch;
                Candidate d = best3(lay(prev, kM)[cd], lay(prev, kGapA)[cd], lay(prev, kGapB)[cd]);
                if (d.score > kNegInf) mc = Candidate{d.score + sub, d.from};
                // A fresh start beats an extension of equal value, so reported
                // alignments carry no zero-score prefix.
                if (local && sub >= mc.score) mc = Candidate{sub, 0};
            }
            if (has_left) {
                Candidate h = best3(bump(lay(cur, kM)[cl], open_ext),
                                    bump(lay(cur, kGapA)[cl], p.gap_extend),
                                    bump(lay(cur, kGapB)[cl], open_ext));
                if (h.score > kNegInf) gac = h;
            }
            if (has_up) {
                Candidate v = best3(bump(lay(prev, kM)[cu], open_ext),
                                    bump(lay(prev, kGapA)[cu], open_ext),
                                    bump(lay(prev, kGapB)[cu], p.gap_extend));
                if (v.score > kNegInf) gbc = v;
            }

            lay(cur, kM)[c] = mc.score;
            lay(cur, kGapA)[c] = gac.score;
            lay(cur, kGapB)[c] = gbc.score;
            tb_row[c] = pack_tb(mc.from, gac.from, gbc.from);

            if (local && mc.score > best_score) {
                best_score = mc.score;
                best_i = i;
                best_j = j;
                best_layer = kM;
            }
        }
        std::swap(prev, cur);
    }

    if (!local) {
        // prev now holds row n.
        const int64_t c = m - row_base(n, dlo);
        Candidate e = best3(lay(prev, kM)[c], lay(prev, kGapA)[c], lay(prev, kGapB)[c]);
        if (e.score <= kNegInf) throw error("alignment band disconnects the matrix corners");
        best_score = e.score;
        best_i = n;
        best_j = m;
        best_layer = uint8_t(e.from - 1);
    }

    out.score = best_score;
    out.end_i = best_i;
    out.end_j = best_j;
    out.end_layer = best_layer;
    return out;
}

PairwiseAlignment walk_back(std::string_view a, std::string_view b, const DpOutcome& dp,
                            bool local) {
    PairwiseAlignment out;
    out.score = dp.score;
    if (local && dp.score <= 0) return out;  // nothing positive anywhere

    std::string ra, rb;
    int64_t i = dp.end_i, j = dp.end_j;
    uint8_t layer = dp.end_layer;

    while (true) {
        if (!local && i == 0 && j == 0) break;
        const uint8_t tb = dp.tb[size_t(i) * dp.width + size_t(j - row_base(i, dp.dlo))];
        const uint8_t from = tb_from(tb, layer);
        switch (layer) {
            case kM:
                ra.push_back(a[size_t(i - 1)]);
                rb.push_back(b[size_t(j - 1)]);
                --i;
                --j;
                break;
            case kGapA:
                ra.push_back('-');
                rb.push_back(b[size_t(j - 1)]);
                --j;
                break;
            default:
                ra.push_back(a[size_t(i - 1)]);
                rb.push_back('-');
                --i;
                break;
        }
        if (from == 0) break;  // fresh local start; the global corner exits above
        layer = uint8_t(from - 1);
    }

    std::reverse(ra.begin(), ra.end());
    std::reverse(rb.begin(), rb.end());
    out.a = {i, dp.end_i};
    out.b = {j, dp.end_j};
    out.a_aligned = std::move(ra);
    out.b_aligned = std::move(rb);
    return out;
}

void extract_locals(std::string_view a, std::string_view b, const ScoringParams& p,
                    int64_t min_score, size_t cell_budget,
                    std::vector<PairwiseAlignment>& out) {
    std::vector<Interval> todo{{0, int64_t(a.size())}};
    while (!todo.empty()) {
        const Interval seg = todo.back();
        todo.pop_back();
        if (seg.length() == 0 || b.empty()) continue;
        std::string_view sa = a.substr(size_t(seg.begin), size_t(seg.length()));
        DpOutcome dp = run_dp(sa, b, p, true, -seg.length(), int64_t(b.size()), cell_budget);
        if (dp.score < min_score) continue;
        PairwiseAlignment al = walk_back(sa, b, dp, true);
        const int64_t a_begin = al.a.begin, a_end = al.a.end;
        al.a.begin += seg.begin;
        al.a.end += seg.begin;
        out.push_back(std::move(al));
        // The extracted region of a is spent; both flanks are searched afresh
        // against all of b.
        todo.push_back({seg.begin, seg.begin + a_begin});
        todo.push_back({seg.begin + a_end, seg.end});
    }
}

}  // namespace

void ScoringParams::validate() const {
    if (match <= 0) throw error("match score must be positive");
    if (mismatch > 0 || gap_open > 0 || gap_extend > 0)
        throw error("mismatch and gap penalties must be <= 0");
}

PairwiseAlignment global_align(std::string_view a, std::string_view b, const ScoringParams& p,
                               size_t cell_budget) {
    p.validate();
    if (a.size() * b.size() > cell_budget)
        throw budget_error("global alignment of " + std::to_string(a.size()) + " x " +
                           std::to_string(b.size()) + " exceeds the cell budget");
    // The +1 rim rows sit just outside the |a|*|b| budget the caller asked for.
    const size_t slack = cell_budget + a.size() + b.size() + 1;
    DpOutcome dp = run_dp(a, b, p, false, -int64_t(a.size()), int64_t(b.size()), slack);
    return walk_back(a, b, dp, false);
}

PairwiseAlignment banded_global_align(std::string_view a, std::string_view b,
                                      const ScoringParams& p, int64_t dlo, int64_t dhi,
                                      size_t cell_budget) {
    p.validate();
    const int64_t corner = int64_t(b.size()) - int64_t(a.size());
    if (dlo > std::min<int64_t>(0, corner) || dhi < std::max<int64_t>(0, corner))
        throw error("alignment band excludes the matrix corners");
    DpOutcome dp = run_dp(a, b, p, false, dlo, dhi, cell_budget);
    return walk_back(a, b, dp, false);
}

PairwiseAlignment banded_local_align(std::string_view a, std::string_view b,
                                     const ScoringParams& p, Interval a_box, Interval b_box,
                                     int64_t dlo, int64_t dhi, size_t cell_budget) {
    p.validate();
    if (a_box.begin < 0 || a_box.end > int64_t(a.size()) || a_box.begin > a_box.end)
        throw error("local alignment box out of range in a");
    if (b_box.begin < 0 || b_box.end > int64_t(b.size()) || b_box.begin > b_box.end)
        throw error("local alignment box out of range in b");
    std::string_view sa = a.substr(size_t(a_box.begin), size_t(a_box.length()));
    std::string_view sb = b.substr(size_t(b_box.begin), size_t(b_box.length()));
    DpOutcome dp = run_dp(sa, sb, p, true, dlo, dhi, cell_budget);
    PairwiseAlignment al = walk_back(sa, sb, dp, true);
    al.a.begin += a_box.begin;
    al.a.end += a_box.begin;
    al.b.begin += b_box.begin;
    al.b.end += b_box.begin;
    return al;
}

std::vector<PairwiseAlignment> local_align(std::string_view a, std::string_view b,
                                           const ScoringParams& p, int64_t min_score,
                                           size_t cell_budget) {
    p.validate();
    if (min_score <= 0) throw error("min_score must be positive");
    if (a.size() * b.size() > cell_budget)
        throw budget_error("local alignment of " + std::to_string(a.size()) + " x " +
                           std::to_string(b.size()) + " exceeds the cell budget");
    const size_t slack = cell_budget + a.size() + b.size() + 1;
    std::vector<PairwiseAlignment> out;
    extract_locals(a, b, p, min_score, slack, out);
    std::sort(out.begin(), out.end(), [](const PairwiseAlignment& x, const PairwiseAlignment& y) {
        if (x.score != y.score) return x.score > y.score;
        if (x.a.begin != y.a.begin) return x.a.begin < y.a.begin;
        return x.b.begin < y.b.begin;
    });
    return out;
}

}  // namespace malign
