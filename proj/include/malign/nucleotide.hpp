#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "malign/bytes.hpp"

namespace malign {

// (base index -> source byte offset) anchors, recorded at cleaning cut
// points. Empty means the identity mapping.
using BaseOffsetMap = std::vector<std::pair<int64_t, int64_t>>;

struct NucleotideSequence {
    std::string id;
    std::string bases;  // over {A,C,G,T}
    BaseOffsetMap offset_map;
};

// Each byte emits 4 bases, most-significant bit pair first (0x1B -> "ACGT").
NucleotideSequence bytes_to_nucleotides(const std::string& id, std::span<const uint8_t> bytes,
                                        const ByteOffsetMap& byte_offsets = {});

// Exact inverse; length must be divisible by 4 and bases must be ACGT.
std::vector<uint8_t> nucleotides_to_bytes(std::string_view bases);

// Source byte offset for a base index (identity when no map is present).
int64_t base_to_source_offset(const BaseOffsetMap& map, int64_t base_index);

// Configuration stamp carried by signatures and models; featurization is
// meaningless across mismatched encoders.
std::string encoder_fingerprint(size_t zero_run = kDefaultZeroRunThreshold);

// Full encode path for one sample: clean (hexdump rules when the sample came
// from a ".bytes" file) then convert.
struct EncodedSample {
    NucleotideSequence seq;
    CleaningReport report;
};
EncodedSample encode_sample(const RawSample& sample, size_t zero_run = kDefaultZeroRunThreshold);
EncodedSample encode_tokens(const std::string& id, const TokenStream& tokens,
                            size_t zero_run = kDefaultZeroRunThreshold);

}  // namespace malign
