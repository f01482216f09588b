#include "malign/lcb.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "malign/align.hpp"
#include "malign/common.hpp"
#include "malign/kernels.hpp"

namespace malign {
namespace {

// Disjoint claimed intervals per sequence, kept sorted. A region joins at
// most one block; claims are how later candidates find out.
class Claims {
public:
    explicit Claims(size_t n_seqs) : by_seq_(n_seqs) {}

    bool overlaps(size_t s, Interval iv) const {
        for (const Interval& c : by_seq_[s]) {
            if (c.begin >= iv.end) break;
            if (c.end > iv.begin) return true;
        }
        return false;
    }

    // Shave claimed edges off iv; empty when a claim bites the middle (the
    // leftovers would be two slivers, not a block).
    Interval trim(size_t s, Interval iv) const {
        for (const Interval& c : by_seq_[s]) {
            if (c.begin >= iv.end) break;
            if (c.end <= iv.begin) continue;
            const bool covers_begin = c.begin <= iv.begin;
            const bool covers_end = c.end >= iv.end;
            if (covers_begin && covers_end) return {iv.begin, iv.begin};
            if (covers_begin)
                iv.begin = c.end;
            else if (covers_end)
                iv.end = c.begin;
            else
                return {iv.begin, iv.begin};
        }
        return iv;
    }

    void add(size_t s, Interval iv) {
        auto& v = by_seq_[s];
        v.insert(std::upper_bound(v.begin(), v.end(), iv,
                                  [](const Interval& x, const Interval& y) {
                                      return x.begin < y.begin;
                                  }),
                 iv);
    }

private:
    std::vector<std::vector<Interval>> by_seq_;
};

// Map a pivot position through a chain: exact inside anchors, linear
// interpolation across the gaps, diagonal extrapolation past the ends.
int64_t project(const std::vector<Anchor>& anchors, int64_t x) {
    const auto it = std::upper_bound(anchors.begin(), anchors.end(), x,
                                     [](int64_t v, const Anchor& an) { return v < an.a_pos; });
    if (it == anchors.begin()) {
        const Anchor& first = anchors.front();
        return first.b_pos - (first.a_pos - x);
    }
    const Anchor& prev = *(it - 1);
    if (x < prev.a_end()) return prev.b_pos + (x - prev.a_pos);
    if (it == anchors.end()) return prev.b_end() + (x - prev.a_end());
    const Anchor& next = *it;
    const int64_t gap_a = std::max<int64_t>(1, next.a_pos - prev.a_end());
    const int64_t gap_b = next.b_pos - prev.b_end();
    return prev.b_end() + (x - prev.a_end()) * gap_b / gap_a;
}

// Cluster near-identical breakpoints and keep one representative (lower
// median) per cluster. tol bounds the cluster diameter.
std::vector<int64_t> canonical_breakpoints(std::vector<int64_t> bps, int64_t tol) {
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    std::vector<int64_t> canon;
    size_t i = 0;
    while (i < bps.size()) {
        size_t j = i;
        while (j < bps.size() && bps[j] - bps[i] <= tol) ++j;
        canon.push_back(bps[i + (j - i - 1) / 2]);
        i = j;
    }
    return canon;
}

int64_t snap(const std::vector<int64_t>& canon, int64_t x) {
    const auto it = std::lower_bound(canon.begin(), canon.end(), x);
    if (it == canon.begin()) return *it;
    if (it == canon.end()) return canon.back();
    return (*it - x) < (x - *(it - 1)) ? *it : *(it - 1);
}

struct ProtoRow {
    size_t seq = 0;
    Interval iv;
};

struct ProtoBlock {
    std::vector<ProtoRow> rows;  // first row is the pivot's
};

}  // namespace

void align_block(AlignmentBlock& block, const std::vector<NucleotideSequence>& seqs,
                 const FindBlocksParams& params) {
    std::unordered_map<std::string, const NucleotideSequence*> by_id;
    for (const auto& s : seqs) by_id.emplace(s.id, &s);

    std::vector<std::string_view> texts;
    texts.reserve(block.rows.size());
    for (const auto& row : block.rows) {
        const auto it = by_id.find(row.seq_id);
        if (it == by_id.end()) throw error("block row references unknown sequence " + row.seq_id);
        const auto& bases = it->second->bases;
        if (row.start < 0 || row.end > int64_t(bases.size()) || row.start >= row.end)
            throw error("block row out of range for " + row.seq_id);
        texts.push_back(std::string_view(bases).substr(size_t(row.start), size_t(row.span())));
    }

    // Center = row with the least total distance to the others, estimated
    // from positional equality over the common prefix.
    const auto& eq = kern::active();
    size_t center = 0;
    int64_t best_total = -1;
    for (size_t i = 0; i < texts.size(); ++i) {
        int64_t total = 0;
        for (size_t j = 0; j < texts.size(); ++j) {
            if (i == j) continue;
            const size_t common = std::min(texts[i].size(), texts[j].size());
            const size_t same = eq.count_eq(texts[i].data(), texts[j].data(), common);
            total += int64_t(std::max(texts[i].size(), texts[j].size())) - int64_t(same);
        }
        if (best_total < 0 || total < best_total) {
            best_total = total;
            center = i;
        }
    }

    // Pairwise banded alignments center vs row.
    struct Pair {
        size_t row;
        PairwiseAlignment al;
    };
    std::vector<Pair> pairs;
    std::vector<char> dropped(block.rows.size(), 0);
    for (size_t i = 0; i < texts.size(); ++i) {
        if (i == center) continue;
        const int64_t diff = int64_t(texts[i].size()) - int64_t(texts[center].size());
        const int64_t dlo = std::min<int64_t>(0, diff) - params.band;
        const int64_t dhi = std::max<int64_t>(0, diff) + params.band;
        try {
            pairs.push_back(
                {i, banded_global_align(texts[center], texts[i], params.scoring, dlo, dhi,
                                        params.cell_budget)});
        } catch (const budget_error&) {
            log_warn("dropping row " + block.rows[i].seq_id + " from block " +
                     std::to_string(block.block_id) + ": alignment over budget");
            dropped[i] = 1;
        }
    }

    // Merge against the center: G[p] = most row bases inserted before center
    // base p anywhere; each row pads its own insertions up to that.
    const size_t L = texts[center].size();
    std::vector<int64_t> gmax(L + 1, 0);
    std::vector<std::vector<int64_t>> ins(pairs.size());
    for (size_t pi = 0; pi < pairs.size(); ++pi) {
        auto& v = ins[pi];
        v.assign(L + 1, 0);
        size_t cpos = 0;
        const auto& al = pairs[pi].al;
        for (size_t col = 0; col < al.a_aligned.size(); ++col) {
            if (al.a_aligned[col] == '-')
                ++v[cpos];
            else
                ++cpos;
        }
        for (size_t p = 0; p <= L; ++p) gmax[p] = std::max(gmax[p], v[p]);
    }

    auto build_center = [&] {
        std::string out;
        for (size_t p = 0; p < L; ++p) {
            out.append(size_t(gmax[p]), '-');
            out.push_back(texts[center][p]);
        }
        out.append(size_t(gmax[L]), '-');
        return out;
    };

    auto build_row = [&](const PairwiseAlignment& al) {
        std::string out;
        size_t cpos = 0;
        std::string pending;  // row bases inserted before the next center base
        for (size_t col = 0; col < al.a_aligned.size(); ++col) {
            if (al.a_aligned[col] == '-') {
                pending.push_back(al.b_aligned[col]);
            } else {
                out += pending;
                out.append(size_t(gmax[cpos] - int64_t(pending.size())), '-');
                pending.clear();
                out.push_back(al.b_aligned[col]);
                ++cpos;
            }
        }
        out += pending;
        out.append(size_t(gmax[L] - int64_t(pending.size())), '-');
        return out;
    };

    std::vector<BlockRow> kept;
    for (size_t i = 0, pi = 0; i < block.rows.size(); ++i) {
        if (dropped[i]) continue;
        BlockRow row = block.rows[i];
        if (i == center) {
            row.aligned = build_center();
        } else {
            row.aligned = build_row(pairs[pi].al);
            ++pi;
        }
        kept.push_back(std::move(row));
    }
    block.rows = std::move(kept);
}

std::vector<AlignmentBlock> find_blocks(const std::vector<NucleotideSequence>& seqs,
                                        const FindBlocksParams& params) {
    if (params.min_block_len <= 0) throw error("min_block_len must be positive");
    if (params.min_support < 2) throw error("min_support must be at least 2");
    params.scoring.validate();
    {
        std::unordered_set<std::string> ids;
        for (const auto& s : seqs)
            if (s.id.empty() || !ids.insert(s.id).second)
                throw error("sequence ids must be unique and non-empty");
    }
    const size_t n = seqs.size();
    std::vector<AlignmentBlock> out;
    if (n < params.min_support) return out;

    std::vector<KmerIndex> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = index_kmers(seqs[i].bases, params.k);

    // Longest sequences pivot first; every sequence gets a turn so motifs
    // missing from any one sample still surface.
    std::vector<size_t> pivot_order(n);
    for (size_t i = 0; i < n; ++i) pivot_order[i] = i;
    std::sort(pivot_order.begin(), pivot_order.end(), [&](size_t x, size_t y) {
        if (seqs[x].bases.size() != seqs[y].bases.size())
            return seqs[x].bases.size() > seqs[y].bases.size();
        return x < y;
    });

    const int64_t min_anchored = std::max<int64_t>(params.k, params.min_block_len / 4);
    const int64_t tol = 2 * int64_t(params.k);

    Claims claims(n);
    std::vector<ProtoBlock> protos;

    for (const size_t p : pivot_order) {
        struct Event {
            size_t other;
            Interval pivot;
            std::vector<Anchor> anchors;
        };
        std::vector<Event> events;
        for (size_t q = 0; q < n; ++q) {
            if (q == p) continue;
            auto chains =
                chain_anchors(anchors_between(idx[p], idx[q]), params.max_gap, min_anchored);
            for (auto& ch : chains) events.push_back({q, ch.a, std::move(ch.anchors)});
        }
        if (events.empty()) continue;

        // Chains covering several shared motifs get cut where other
        // sequences' chains begin or end, so supports line up per locus.
        std::vector<int64_t> bps;
        for (const auto& e : events) {
            bps.push_back(e.pivot.begin);
            bps.push_back(e.pivot.end);
        }
        const auto canon = canonical_breakpoints(bps, tol);

        std::map<Interval, std::vector<ProtoRow>, decltype([](const Interval& x, const Interval& y) {
                     return x.begin != y.begin ? x.begin < y.begin : x.end < y.end;
                 })>
            seg_rows;
        for (const auto& e : events) {
            const int64_t lo = snap(canon, e.pivot.begin);
            const int64_t hi = snap(canon, e.pivot.end);
            if (hi <= lo) continue;
            auto c1 = std::lower_bound(canon.begin(), canon.end(), lo);
            for (; c1 != canon.end() && *c1 < hi; ++c1) {
                const int64_t seg_begin = *c1;
                const int64_t seg_end = (c1 + 1 != canon.end()) ? std::min(*(c1 + 1), hi) : hi;
                if (seg_end - seg_begin < params.min_block_len) continue;
                Interval row_iv{project(e.anchors, seg_begin), project(e.anchors, seg_end)};
                row_iv.begin = std::clamp<int64_t>(row_iv.begin, 0, int64_t(seqs[e.other].bases.size()));
                row_iv.end = std::clamp<int64_t>(row_iv.end, 0, int64_t(seqs[e.other].bases.size()));
                if (row_iv.length() < params.min_block_len / 2) continue;
                seg_rows[{seg_begin, seg_end}].push_back({e.other, row_iv});
            }
        }

        for (auto& [seg, cand] : seg_rows) {
            if (claims.overlaps(p, seg)) continue;
            // One row per sequence: widest candidate wins.
            std::sort(cand.begin(), cand.end(), [](const ProtoRow& x, const ProtoRow& y) {
                if (x.seq != y.seq) return x.seq < y.seq;
                if (x.iv.length() != y.iv.length()) return x.iv.length() > y.iv.length();
                return x.iv.begin < y.iv.begin;
            });
            ProtoBlock proto;
            proto.rows.push_back({p, seg});
            size_t last_seq = SIZE_MAX;
            for (const auto& row : cand) {
                if (row.seq == last_seq) continue;
                last_seq = row.seq;
                const Interval trimmed = claims.trim(row.seq, row.iv);
                if (trimmed.length() < params.min_block_len / 2) continue;
                proto.rows.push_back({row.seq, trimmed});
            }
            if (proto.rows.size() < params.min_support) continue;
            for (const auto& row : proto.rows) claims.add(row.seq, row.iv);
            protos.push_back(std::move(proto));
        }
    }

    // Deterministic presentation: rows by input order, blocks by the
    // earliest row they touch.
    for (auto& proto : protos) {
        std::sort(proto.rows.begin(), proto.rows.end(), [](const ProtoRow& x, const ProtoRow& y) {
            if (x.seq != y.seq) return x.seq < y.seq;
            return x.iv.begin < y.iv.begin;
        });
    }
    std::sort(protos.begin(), protos.end(), [](const ProtoBlock& x, const ProtoBlock& y) {
        if (x.rows[0].seq != y.rows[0].seq) return x.rows[0].seq < y.rows[0].seq;
        if (x.rows[0].iv.begin != y.rows[0].iv.begin) return x.rows[0].iv.begin < y.rows[0].iv.begin;
        return x.rows[0].iv.end < y.rows[0].iv.end;
    });

    int64_t next_id = 1;
    for (const auto& proto : protos) {
        AlignmentBlock block;
        block.block_id = next_id;
        for (const auto& row : proto.rows) {
            const auto& s = seqs[row.seq];
            block.rows.push_back(
                {s.id, row.iv.begin, row.iv.end, '+', int64_t(s.bases.size()), ""});
        }
        align_block(block, seqs, params);
        if (block.rows.size() < params.min_support) {
            log_warn("block discarded: support fell below " + std::to_string(params.min_support) +
                     " after alignment");
            continue;
        }
        ++next_id;
        out.push_back(std::move(block));
    }
    return out;
}

}  // namespace malign
