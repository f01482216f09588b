#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "malign/lcb.hpp"

namespace malign {

// Consensus of one aligned block plus per-position conservation. gamma[p]
// holds the exact fraction of rows carrying A,C,G,T at that position (gaps
// count toward the denominator only). column_map points each consensus
// position back at its original alignment column.
struct ConsensusBlock {
    int64_t block_id = 0;
    int64_t n_rows = 0;
    std::string bases;
    std::vector<std::array<double, 4>> gamma;
    std::vector<int64_t> column_map;
};

// Majority-gap columns are dropped; ties between bases resolve to the
// alphabetically first.
ConsensusBlock build_consensus(const AlignmentBlock& block);

struct Signature {
    std::string family;
    std::string fingerprint;  // encoder stamp the corpus was built with
    std::vector<ConsensusBlock> blocks;
};

Signature build_signature(const std::vector<AlignmentBlock>& blocks, const std::string& family,
                          const std::string& fingerprint);

// dir/consensus.fasta (">block_<id> n=<rows>") plus dir/consensus.gamma
// ("<block_id> <pos> <gA> <gC> <gG> <gT>" rows; family, fingerprint and
// column maps ride in '#' header lines).
void save_signature(const Signature& sig, const std::string& dir);

// Structural validation on load: every consensus position must have exactly
// one gamma row, fractions must be sane, and both files must agree.
Signature load_signature(const std::string& dir);

}  // namespace malign
