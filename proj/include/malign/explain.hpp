#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "malign/lcb.hpp"
#include "malign/model.hpp"

namespace malign {

struct RankedBlock {
    int64_t block_id = 0;
    double weight = 0.0;      // model weight of the block's alpha feature
    double mean_gamma = 0.0;  // average conservation of the consensus letters
};

// Blocks ranked by |alpha weight| (weights act on standardized features, so
// magnitudes are comparable). Ties break toward the smaller block id. Returns
// at most top_k entries.
std::vector<RankedBlock> top_blocks(const FamilyModel& model, const Signature& sig, size_t top_k);

struct LocatedRow {
    int64_t block_id = 0;
    std::string seq_id;
    Interval bases;          // [begin, end) in the cleaned base sequence
    Interval bytes;          // [begin, end) in the source file
    bool cleaned_coords = false;  // no offset map: byte coords are cleaned, not source
    bool non_contiguous = false;  // a cleaning cut lies inside the span
};

// Maps every row of one alignment block back to source byte intervals.
// offset_maps is keyed by sequence id; sequences without an entry fall back
// to cleaned coordinates (base index / 4) and are flagged.
std::vector<LocatedRow> locate(int64_t block_id, const std::vector<AlignmentBlock>& blocks,
                               const std::map<std::string, BaseOffsetMap>& offset_maps);

// Trace table for the ranked blocks: one line per located row, blocks in
// ranked order.
void write_trace_csv(const std::string& path, const std::vector<RankedBlock>& ranked,
                     const std::vector<LocatedRow>& rows);

}  // namespace malign
