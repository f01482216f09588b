#include "malign/nucleotide.hpp"

#include <algorithm>

#include "malign/kernels.hpp"

namespace malign {

NucleotideSequence bytes_to_nucleotides(const std::string& id, std::span<const uint8_t> bytes,
                                        const ByteOffsetMap& byte_offsets) {
    NucleotideSequence seq;
    seq.id = id;
    seq.bases.resize(bytes.size() * 4);
    kern::active().expand_bases(bytes.data(), bytes.size(), seq.bases.data());
    seq.offset_map.reserve(byte_offsets.size());
    for (const auto& [retained, source] : byte_offsets)
        seq.offset_map.emplace_back(retained * 4, source);
    return seq;
}

std::vector<uint8_t> nucleotides_to_bytes(std::string_view bases) {
    if (bases.size() % 4 != 0)
        throw error("nucleotide sequence length " + std::to_string(bases.size()) +
                    " is not divisible by 4");
    std::vector<uint8_t> codes(bases.size());
    kern::active().pack_codes(bases.data(), bases.size(), codes.data());
    std::vector<uint8_t> out(bases.size() / 4);
    for (size_t i = 0; i < out.size(); ++i) {
        uint8_t b = 0;
        for (int k = 0; k < 4; ++k) {
            uint8_t c = codes[4 * i + static_cast<size_t>(k)];
            if (c == kern::kInvalidCode)
                throw error("invalid base '" + std::string(1, bases[4 * i + static_cast<size_t>(k)]) +
                            "' at position " + std::to_string(4 * i + static_cast<size_t>(k)));
            b = static_cast<uint8_t>((b << 2) | c);
        }
        out[i] = b;
    }
    return out;
}

int64_t base_to_source_offset(const BaseOffsetMap& map, int64_t base_index) {
    if (map.empty()) return base_index / 4;
    auto it = std::upper_bound(map.begin(), map.end(), base_index,
                               [](int64_t v, const auto& p) { return v < p.first; });
    if (it == map.begin()) return base_index / 4;
    --it;
    return it->second + (base_index - it->first) / 4;
}

std::string encoder_fingerprint(size_t zero_run) {
    return "2bit-msb;zrun=" + std::to_string(zero_run);
}

EncodedSample encode_sample(const RawSample& sample, size_t zero_run) {
    CleanResult cleaned = clean(std::span<const uint8_t>(sample.bytes), zero_run);
    EncodedSample enc;
    enc.seq = bytes_to_nucleotides(sample.id, cleaned.bytes, cleaned.offsets);
    enc.report = cleaned.report;
    return enc;
}

EncodedSample encode_tokens(const std::string& id, const TokenStream& tokens, size_t zero_run) {
    CleanResult cleaned = clean(tokens, zero_run);
    EncodedSample enc;
    enc.seq = bytes_to_nucleotides(id, cleaned.bytes, cleaned.offsets);
    enc.report = cleaned.report;
    return enc;
}

}  // namespace malign
