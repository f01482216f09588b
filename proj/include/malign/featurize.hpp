#pragma once

#include <string>
#include <vector>

#include "malign/nucleotide.hpp"
#include "malign/seed.hpp"
#include "malign/signature.hpp"

namespace malign {

struct FeaturizeParams {
    // Mismatch at -2 puts break-even identity at 2/3: chance-level similarity
    // (50% after heavy corruption) drifts negative instead of random-walking
    // past min_score, while real motif copies sit far above it.
    ScoringParams scoring{1, -2, -2, -1};
    int k = kDefaultSeedK;
    // Alignments below this never enter the count. Half the default minimum
    // block length: lucky unmutated runs inside corrupted samples stay below
    // it, a real block copy lands far above.
    int64_t min_score = 100;
    int64_t band = kDefaultBand;
    size_t cell_budget = kDefaultCellBudget;
};

// Interleaved (alpha, beta) per block in ascending block_id order, so the
// vector has 2m entries for an m-block signature.
struct FeatureVector {
    std::string sample_id;
    std::vector<double> values;
};

// Score of one local alignment: its per-position conservation sum scaled by
// the number of rows that built the block.
double aligned_sequence_score(double gamma_sum, int64_t n_rows);

// Aligns the sample against every consensus block. alpha sums conservation
// over all alignments (the sample's own base picks the gamma entry, so
// mismatches earn the minority score; bases opposite consensus gaps earn 0);
// beta counts the alignments. A non-empty expected_fingerprint must equal the
// signature's.
FeatureVector score_sample(const NucleotideSequence& sample, const Signature& sig,
                           const FeaturizeParams& params = {},
                           const std::string& expected_fingerprint = "");

struct FeatureMatrix {
    std::vector<std::string> sample_ids;
    std::vector<int> labels;  // 1 = family member, 0 = negative
    std::vector<std::vector<double>> rows;
    int64_t n_blocks = 0;
};

// Positives first, then negatives, each in input order.
FeatureMatrix featurize_corpus(const std::vector<NucleotideSequence>& pos,
                               const std::vector<NucleotideSequence>& neg, const Signature& sig,
                               const FeaturizeParams& params = {},
                               const std::string& expected_fingerprint = "");

// CSV with header "sample_id,label,a1,b1,a2,b2,...".
void write_features_csv(const FeatureMatrix& m, const std::string& path);
FeatureMatrix read_features_csv(const std::string& path);

}  // namespace malign
