#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "malign/nucleotide.hpp"
#include "malign/seed.hpp"

namespace malign {

struct BlockRow {
    std::string seq_id;
    int64_t start = 0;  // [start, end) in the sequence's own base coordinates
    int64_t end = 0;
    char strand = '+';
    int64_t src_size = 0;
    std::string aligned;  // row text with '-' gaps

    int64_t span() const { return end - start; }
};

struct AlignmentBlock {
    int64_t block_id = 0;
    std::vector<BlockRow> rows;

    size_t width() const { return rows.empty() ? 0 : rows.front().aligned.size(); }
};

struct FindBlocksParams {
    int k = kDefaultSeedK;
    int64_t max_gap = kDefaultChainGap;
    int64_t min_block_len = 200;  // bases
    size_t min_support = 2;      // distinct sequences per block
    int64_t band = kDefaultBand;
    ScoringParams scoring;
    size_t cell_budget = kDefaultCellBudget;
};

// Locally collinear blocks shared across the corpus: regions that align
// well between >= min_support sequences regardless of where each sequence
// carries them. Each block holds at most one row per sequence; a sequence
// region belongs to at most one block. Rows come back aligned (multiple
// alignment via the center-star heuristic) and the result is deterministic
// for a given input order.
std::vector<AlignmentBlock> find_blocks(const std::vector<NucleotideSequence>& seqs,
                                        const FindBlocksParams& params = {});

// Fill in the rows' aligned texts by aligning every row to the most central
// row (least total distance). Rows whose pairwise step exceeds the cell
// budget are dropped with a warning; the block keeps its survivors.
void align_block(AlignmentBlock& block, const std::vector<NucleotideSequence>& seqs,
                 const FindBlocksParams& params = {});

}  // namespace malign
