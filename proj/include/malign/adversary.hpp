#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "malign/model.hpp"

namespace malign {

enum class MutationKind {
    pad_append,
    intersperse,
    shuffle_blocks,
    substitute,
    cross_family_inject,
};

MutationKind mutation_kind_from_string(const std::string& s);
std::string to_string(MutationKind kind);

inline constexpr size_t kShuffleChunk = 4096;

struct MutationSpec {
    MutationKind kind = MutationKind::pad_append;
    double magnitude = 0.0125;  // fraction of input size, or per-byte rate
    uint64_t seed = 1;
};

// Deterministic function of (bytes, spec, pool). pool supplies donor material
// for intersperse and cross_family_inject and must be non-empty for those.
// pad_append, intersperse and cross_family_inject grow the sample by exactly
// ceil(magnitude * size); shuffle_blocks and substitute preserve size.
std::vector<uint8_t> mutate(const std::vector<uint8_t>& bytes, const MutationSpec& spec,
                            const std::vector<std::vector<uint8_t>>& pool = {});

struct AdvSample {
    std::string id;
    std::vector<uint8_t> bytes;
    std::string family;  // ground-truth label
};

struct RobustnessRow {
    MutationSpec spec;
    int64_t evaded = 0;
    int64_t total = 0;
    double rate() const { return total == 0 ? 0.0 : double(evaded) / double(total); }
};

struct RobustnessReport {
    std::vector<RobustnessRow> rows;  // one per spec, in input order
};

// Mutates every sample under every spec and re-runs detection. A sample
// counts as evaded when detection no longer returns its true family.
RobustnessReport evaluate_robustness(const std::vector<FamilyDetector>& detectors,
                                     const std::vector<AdvSample>& samples,
                                     const std::vector<MutationSpec>& specs,
                                     const std::vector<std::vector<uint8_t>>& pool,
                                     size_t zero_run = kDefaultZeroRunThreshold,
                                     const FeaturizeParams& fparams = {});

// CSV: "kind,magnitude,seed,evaded,total,evasion_rate".
void write_robustness_csv(const RobustnessReport& report, const std::string& path);

}  // namespace malign
