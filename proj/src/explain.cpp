#include "malign/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "malign/common.hpp"

namespace malign {

namespace {

int gamma_index(char base) {
    switch (base) {
        case 'A': return 0;
        case 'C': return 1;
        case 'G': return 2;
        case 'T': return 3;
        default: return -1;
    }
}

double consensus_mean_gamma(const ConsensusBlock& cb) {
    if (cb.bases.empty()) return 0.0;
    double sum = 0.0;
    for (size_t p = 0; p < cb.bases.size(); ++p) {
        int v = gamma_index(cb.bases[p]);
        if (v >= 0) sum += cb.gamma[p][size_t(v)];
    }
    return sum / double(cb.bases.size());
}

}  // namespace

std::vector<RankedBlock> top_blocks(const FamilyModel& model, const Signature& sig, size_t top_k) {
    if (model.encoder_fingerprint != sig.fingerprint) {
        throw error("top_blocks: model and signature disagree on encoder fingerprint");
    }
    if (model.feature_order != feature_order_fingerprint(sig)) {
        throw error("top_blocks: model feature order does not match the signature");
    }
    if (model.weights.size() != 2 * sig.blocks.size()) {
        throw error("top_blocks: weight vector does not cover the signature blocks");
    }

    std::vector<RankedBlock> ranked(sig.blocks.size());
    for (size_t i = 0; i < sig.blocks.size(); ++i) {
        ranked[i].block_id = sig.blocks[i].block_id;
        ranked[i].weight = model.weights[2 * i];
        ranked[i].mean_gamma = consensus_mean_gamma(sig.blocks[i]);
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedBlock& a, const RankedBlock& b) {
        double wa = std::fabs(a.weight), wb = std::fabs(b.weight);
        if (wa != wb) return wa > wb;
        return a.block_id < b.block_id;
    });
    if (ranked.size() > top_k) ranked.resize(top_k);
    return ranked;
}

std::vector<LocatedRow> locate(int64_t block_id, const std::vector<AlignmentBlock>& blocks,
                               const std::map<std::string, BaseOffsetMap>& offset_maps) {
    const AlignmentBlock* block = nullptr;
    for (const auto& b : blocks) {
        if (b.block_id == block_id) {
            block = &b;
            break;
        }
    }
    if (!block) throw error("locate: block " + std::to_string(block_id) + " not in the alignment");

    static const BaseOffsetMap kIdentity;
    std::vector<LocatedRow> rows;
    rows.reserve(block->rows.size());
    for (const auto& r : block->rows) {
        LocatedRow out;
        out.block_id = block_id;
        out.seq_id = r.seq_id;
        out.bases = {r.start, r.end};

        auto it = offset_maps.find(r.seq_id);
        out.cleaned_coords = (it == offset_maps.end());
        const BaseOffsetMap& map = out.cleaned_coords ? kIdentity : it->second;

        const int64_t first = base_to_source_offset(map, r.start);
        const int64_t last = base_to_source_offset(map, r.end - 1);
        out.bytes = {first, last + 1};
        // Cut-free spans advance source bytes in lockstep with cleaned bytes;
        // any cut inside the span removes at least one byte and breaks that.
        out.non_contiguous = (last - first) != ((r.end - 1) / 4 - r.start / 4);
        rows.push_back(out);
    }
    return rows;
}

void write_trace_csv(const std::string& path, const std::vector<RankedBlock>& ranked,
                     const std::vector<LocatedRow>& rows) {
    std::string out = "block_id,weight,mean_gamma,seq_id,base_begin,base_end,byte_begin,byte_end,"
                      "cleaned_coords,non_contiguous\n";
    char buf[256];
    for (const auto& rb : ranked) {
        for (const auto& row : rows) {
            if (row.block_id != rb.block_id) continue;
            std::snprintf(buf, sizeof(buf), "%lld,%.10g,%.6f,", (long long)rb.block_id, rb.weight,
                          rb.mean_gamma);
            out += buf;
            out += row.seq_id;
            std::snprintf(buf, sizeof(buf), ",%lld,%lld,%lld,%lld,%d,%d\n", (long long)row.bases.begin,
                          (long long)row.bases.end, (long long)row.bytes.begin, (long long)row.bytes.end,
                          int(row.cleaned_coords), int(row.non_contiguous));
            out += buf;
        }
    }
    write_text_file(path, out);
}

}  // namespace malign
