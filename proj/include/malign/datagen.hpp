#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "malign/bytes.hpp"

namespace malign {

struct DatagenParams {
    uint64_t seed = 1;
    uint64_t layout_seed = 0;  // 0: derived from seed. Motifs depend only on
                               // seed, so a different layout_seed re-deals the
                               // same motifs in a new order.
    int n_samples = 20;
    int n_blocks = 5;
    int64_t block_len = 500;  // bytes per motif
    double mutation_rate = 0.02;
    int64_t filler_len = 50000;  // total filler bytes per sample
    int64_t min_gap = 200;       // filler guaranteed between motif copies
    bool shuffle = true;
};

struct MotifPlacement {
    std::string sample_id;
    int64_t offset = 0;  // byte offset of the (mutated) motif copy
    int motif_id = 0;
};

// Every positive carries one point-mutated copy of each motif, separated by
// random filler; negatives are pure filler of the same length. truth records
// each copy's placement, so every positive byte is attributable to exactly
// one motif or to filler.
struct SyntheticFamily {
    std::string family;
    std::vector<std::vector<uint8_t>> motifs;
    std::vector<RawSample> positives;
    std::vector<RawSample> negatives;
    std::vector<MotifPlacement> truth;
};

SyntheticFamily generate_family(const std::string& family, const DatagenParams& params = {});

// "sample_id,offset,motif_id" rows in generation order.
void write_ground_truth_csv(const std::string& path, const std::vector<MotifPlacement>& truth);

}  // namespace malign
