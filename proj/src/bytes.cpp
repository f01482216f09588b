#include "malign/bytes.hpp"

#include <algorithm>

namespace malign {

namespace {

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

bool is_hex_token(std::string_view tok) {
    if (tok.empty()) return false;
    return std::all_of(tok.begin(), tok.end(), [](char c) { return hex_digit(c) >= 0; });
}

}  // namespace

TokenStream parse_hexdump(std::string_view text, const std::string& filename) {
    TokenStream tokens;
    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        size_t i = 0;
        bool first = true;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
            if (i >= line.size()) break;
            size_t j = i;
            while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
            std::string_view tok = line.substr(i, j - i);
            if (first) {
                // address column; any width, hex only
                if (!is_hex_token(tok))
                    throw parse_error("invalid address token \"" + std::string(tok) + "\"", filename, line_no);
                first = false;
            } else if (tok == "??") {
                tokens.push_back(kUnknownToken);
            } else {
                if (tok.size() != 2 || !is_hex_token(tok))
                    throw parse_error("invalid byte token \"" + std::string(tok) + "\"", filename, line_no);
                tokens.push_back(static_cast<uint16_t>(hex_digit(tok[0]) * 16 + hex_digit(tok[1])));
            }
            i = j;
        }

        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    return tokens;
}

namespace {

// "??" tokens are dropped first, then maximal 00-runs are measured on what
// remains — otherwise a hole between two short zero runs would leave a long
// run for a second cleaning pass to remove, breaking idempotence.
CleanResult clean_impl(const uint16_t* tokens, size_t n, size_t zero_run, bool allow_unknown) {
    CleanResult r;

    std::vector<uint8_t> bytes;
    std::vector<int64_t> source;  // source offset per surviving byte
    bytes.reserve(n);
    source.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        if (allow_unknown && tokens[i] == kUnknownToken) {
            r.report.removed_unknown++;
            continue;
        }
        bytes.push_back(static_cast<uint8_t>(tokens[i]));
        source.push_back(static_cast<int64_t>(i));
    }

    r.bytes.reserve(bytes.size());
    std::vector<int64_t> kept_source;
    kept_source.reserve(bytes.size());
    size_t i = 0;
    while (i < bytes.size()) {
        if (bytes[i] == 0x00 && zero_run > 0) {
            size_t j = i;
            while (j < bytes.size() && bytes[j] == 0x00) ++j;
            size_t run = j - i;
            if (run >= zero_run) {
                r.report.removed_zero_runs += run;
                i = j;
                continue;
            }
        }
        r.bytes.push_back(bytes[i]);
        kept_source.push_back(source[i]);
        ++i;
    }
    r.report.retained = r.bytes.size();

    // anchors wherever the source offset jumps
    bool any_cut = r.report.removed_unknown > 0 || r.report.removed_zero_runs > 0;
    if (any_cut) {
        for (size_t idx = 0; idx < kept_source.size(); ++idx) {
            if (idx == 0 || kept_source[idx] != kept_source[idx - 1] + 1)
                r.offsets.emplace_back(static_cast<int64_t>(idx), kept_source[idx]);
        }
        if (r.offsets.empty() || r.offsets.front().first != 0) {
            // all-removed input still gets a degenerate start anchor
            r.offsets.insert(r.offsets.begin(), {0, 0});
        }
    }
    return r;
}

}  // namespace

CleanResult clean(const TokenStream& tokens, size_t zero_run) {
    return clean_impl(tokens.data(), tokens.size(), zero_run, true);
}

CleanResult clean(std::span<const uint8_t> bytes, size_t zero_run) {
    TokenStream widened(bytes.begin(), bytes.end());
    return clean_impl(widened.data(), widened.size(), zero_run, false);
}

int64_t map_to_source_offset(const ByteOffsetMap& offsets, int64_t retained_index) {
    if (offsets.empty()) return retained_index;
    auto it = std::upper_bound(offsets.begin(), offsets.end(), retained_index,
                               [](int64_t v, const auto& p) { return v < p.first; });
    if (it == offsets.begin()) return retained_index;  // before first anchor: identity
    --it;
    return it->second + (retained_index - it->first);
}

}  // namespace malign
