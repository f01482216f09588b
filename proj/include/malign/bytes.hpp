#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "malign/common.hpp"

namespace malign {

enum class SampleOrigin { binary, hexdump };

struct RawSample {
    std::string id;
    std::vector<uint8_t> bytes;
    SampleOrigin origin = SampleOrigin::binary;
};

// One token of a hexdump ".bytes" file: a byte value or the "??" marker.
inline constexpr uint16_t kUnknownToken = 0x100;
using TokenStream = std::vector<uint16_t>;

// Kaggle-style layout: per line an address token followed by two-hex-digit
// byte tokens; "??" marks unknown bytes. Tokens are returned in file order.
TokenStream parse_hexdump(std::string_view text, const std::string& filename = "<hexdump>");

struct CleaningReport {
    size_t removed_unknown = 0;
    size_t removed_zero_runs = 0;
    size_t retained = 0;
};

// (retained byte index, source byte offset) anchors; one implicit (0,0)
// start plus one anchor after every cut. Monotone in both coordinates.
using ByteOffsetMap = std::vector<std::pair<int64_t, int64_t>>;

struct CleanResult {
    std::vector<uint8_t> bytes;
    CleaningReport report;
    ByteOffsetMap offsets;  // empty when nothing was removed
};

inline constexpr size_t kDefaultZeroRunThreshold = 16;

// Drops every "??" token and every maximal run of >= zero_run consecutive
// 0x00 bytes. Anchors are recorded after each cut.
CleanResult clean(const TokenStream& tokens, size_t zero_run = kDefaultZeroRunThreshold);

// Raw-binary path: only the zero-run rule applies.
CleanResult clean(std::span<const uint8_t> bytes, size_t zero_run = kDefaultZeroRunThreshold);

// Map a retained-byte index back to its source byte offset.
int64_t map_to_source_offset(const ByteOffsetMap& offsets, int64_t retained_index);

}  // namespace malign
