#include "malign/datagen.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "malign/common.hpp"

namespace malign {

namespace {

void append_random(std::vector<uint8_t>& out, Rng& rng, int64_t n) {
    for (int64_t i = 0; i < n; ++i) out.push_back(rng.byte());
}

std::string sample_name(const std::string& family, const char* kind, int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "_%s%03d", kind, index);
    return family + buf;
}

}  // namespace

SyntheticFamily generate_family(const std::string& family, const DatagenParams& p) {
    if (family.empty()) throw error("generate_family: family name is empty");
    if (p.n_samples <= 0 || p.n_blocks <= 0 || p.block_len <= 0 || p.filler_len <= 0) {
        throw error("generate_family: counts and lengths must be positive");
    }
    if (p.mutation_rate < 0.0 || p.mutation_rate > 0.1) {
        throw error("generate_family: mutation_rate must be in [0, 0.1]");
    }

    SyntheticFamily fam;
    fam.family = family;

    Rng motif_rng(p.seed);
    fam.motifs.resize(size_t(p.n_blocks));
    for (auto& m : fam.motifs) append_random(m, motif_rng, p.block_len);

    Rng layout(p.layout_seed ? p.layout_seed : p.seed + 1);
    const size_t n_gaps = size_t(p.n_blocks) + 1;
    const int64_t base_gap = std::min(p.min_gap, p.filler_len / int64_t(n_gaps));
    const int64_t sample_len = p.filler_len + int64_t(p.n_blocks) * p.block_len;

    for (int s = 0; s < p.n_samples; ++s) {
        std::vector<int> order(size_t(p.n_blocks));
        std::iota(order.begin(), order.end(), 0);
        if (p.shuffle) layout.shuffle(order);

        std::vector<int64_t> gaps(n_gaps, base_gap);
        int64_t spare = p.filler_len - base_gap * int64_t(n_gaps);
        while (spare > 0) {
            gaps[size_t(layout.below(n_gaps))] += 1;
            --spare;
        }

        RawSample sample;
        sample.id = sample_name(family, "pos", s);
        sample.origin = SampleOrigin::binary;
        sample.bytes.reserve(size_t(sample_len));
        append_random(sample.bytes, layout, gaps[0]);
        for (size_t j = 0; j < order.size(); ++j) {
            fam.truth.push_back({sample.id, int64_t(sample.bytes.size()), order[j]});
            for (uint8_t b : fam.motifs[size_t(order[j])]) {
                const bool mutate = layout.real() < p.mutation_rate;
                sample.bytes.push_back(mutate ? uint8_t(b ^ (1 + layout.below(255))) : b);
            }
            append_random(sample.bytes, layout, gaps[j + 1]);
        }
        fam.positives.push_back(std::move(sample));
    }

    for (int s = 0; s < p.n_samples; ++s) {
        RawSample neg;
        neg.id = sample_name(family, "neg", s);
        neg.origin = SampleOrigin::binary;
        neg.bytes.reserve(size_t(sample_len));
        append_random(neg.bytes, layout, sample_len);
        fam.negatives.push_back(std::move(neg));
    }

    return fam;
}

void write_ground_truth_csv(const std::string& path, const std::vector<MotifPlacement>& truth) {
    std::string out = "sample_id,offset,motif_id\n";
    char buf[64];
    for (const auto& t : truth) {
        out += t.sample_id;
        std::snprintf(buf, sizeof(buf), ",%lld,%d\n", (long long)t.offset, t.motif_id);
        out += buf;
    }
    write_text_file(path, out);
}

}  // namespace malign
