#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "malign/lcb.hpp"
#include "malign/model.hpp"

namespace malign {

// Input paths that do not exist; the CLI maps this to its usage exit code.
struct missing_input_error : error {
    explicit missing_input_error(const std::string& path)
        : error("input not found: " + path), path(path) {}
    std::string path;
};

struct PipelineFamily {
    std::string name;
    std::string positives;  // directory of raw samples
};

struct PipelineConfig {
    std::string out = "malign-run";
    std::string negatives;       // directory of raw benign samples
    std::string format = "bytes";  // "bytes" hexdumps or "bin" raw binaries
    uint64_t seed = 1;
    double split = 0.8;  // train fraction; 1.0 skips held-out evaluation
    size_t zero_run = kDefaultZeroRunThreshold;
    int jobs = 1;
    std::vector<PipelineFamily> families;
    FindBlocksParams blocks;
    FeaturizeParams featurize;
    TrainConfig train;
};

// TOML layout: [pipeline] out/negatives/format/seed/split/zero_run/jobs,
// one [family.<name>] table with positives = "<dir>" per family, optional
// [blocks] k/min_len/min_support/band, [featurize] min_score/k/band,
// [train] c/l1_ratio/threshold. Only seed, negatives and one family are
// required; everything else defaults.
PipelineConfig load_pipeline_config(const std::string& path);

struct FamilyReport {
    std::string family;
    size_t n_blocks = 0;
    size_t train_pos = 0, train_neg = 0;
    size_t test_pos = 0, test_neg = 0;
    bool has_test = false;   // split < 1 and the family kept test samples
    double accuracy = 0.0;   // balanced held-out accuracy, valid when has_test
    size_t routed_correct = 0, routed_total = 0;  // detect() on test positives
};

struct PipelineReport {
    std::vector<FamilyReport> families;
    bool has_test = false;
    size_t benign_correct = 0, benign_total = 0;  // test negatives kept benign
};

// Full run: encode, blocks from training positives only, signature, balanced
// featurize, train, then held-out evaluation with every family's detector.
// Artifacts land under cfg.out in per-family directories, each byte-identical
// to the matching subcommand's output on the same inputs.
PipelineReport run_pipeline(const PipelineConfig& cfg);

// "-" marks metrics the split left unmeasurable.
void write_pipeline_report_csv(const std::string& path, const PipelineReport& report);

}  // namespace malign
