#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "malign/bytes.hpp"
#include "malign/common.hpp"
#include "malign/fasta.hpp"
#include "malign/nucleotide.hpp"

using namespace malign;

namespace {

TokenStream tokens_of(std::initializer_list<int> vals) {
    TokenStream t;
    for (int v : vals) t.push_back(uint16_t(v));
    return t;
}

std::vector<uint8_t> random_bytes(Rng& rng, size_t n) {
    std::vector<uint8_t> v(n);
    for (auto& b : v) b = rng.byte();
    return v;
}

}  // namespace

TEST_SUITE_BEGIN("seqcodec");

TEST_CASE("hexdump lines drop the address and keep byte order") {
    const auto t = parse_hexdump("00401000 4D 5A 90\n00401010 00 FF\n");
    CHECK(t == tokens_of({0x4D, 0x5A, 0x90, 0x00, 0xFF}));
}

TEST_CASE("hexdump ?? tokens survive parsing") {
    const auto t = parse_hexdump("00401000 4D ?? 5A\n");
    REQUIRE(t.size() == 3);
    CHECK(t[0] == 0x4D);
    CHECK(t[1] == kUnknownToken);
    CHECK(t[2] == 0x5A);
}

TEST_CASE("hexdump rejects malformed byte tokens with the line number") {
    CHECK_THROWS_WITH_AS(parse_hexdump("00401000 4G 5A\n", "x.bytes"),
                         doctest::Contains("x.bytes:1"), parse_error);
    CHECK_THROWS_AS(parse_hexdump("00401000 4D\nzz 5A\n"), parse_error);
    CHECK_THROWS_AS(parse_hexdump("00401000 4D 5AA\n"), parse_error);
}

TEST_CASE("hexdump accepts blank lines and missing trailing newline") {
    const auto t = parse_hexdump("\n00401000 4D\n\n00401010 5A");
    CHECK(t == tokens_of({0x4D, 0x5A}));
}

TEST_CASE("cleaning drops unknown bytes and counts them") {
    const auto r = clean(tokens_of({0x4D, int(kUnknownToken), 0x5A}));
    CHECK(r.bytes == std::vector<uint8_t>{0x4D, 0x5A});
    CHECK(r.report.removed_unknown == 1);
    CHECK(r.report.removed_zero_runs == 0);
    CHECK(r.report.retained == 2);
}

TEST_CASE("cleaning removes zero runs at the threshold and keeps shorter ones") {
    TokenStream t{0x11};
    for (int i = 0; i < 16; ++i) t.push_back(0x00);
    t.push_back(0x22);
    t.push_back(0x00);
    t.push_back(0x00);
    t.push_back(0x33);

    const auto r = clean(t, 16);
    CHECK(r.bytes == std::vector<uint8_t>{0x11, 0x22, 0x00, 0x00, 0x33});
    CHECK(r.report.removed_zero_runs == 16);

    const auto keep = clean(t, 17);
    CHECK(keep.bytes.size() == t.size());
    CHECK(keep.offsets.empty());
}

TEST_CASE("cleaning is idempotent when holes and zero runs interact") {
    // 8 zeros, a hole, 8 zeros: dropping the hole must not create a fresh
    // 16-run for a second pass.
    TokenStream t{0xAB};
    for (int i = 0; i < 8; ++i) t.push_back(0x00);
    t.push_back(int(kUnknownToken));
    for (int i = 0; i < 8; ++i) t.push_back(0x00);
    t.push_back(0xCD);

    const auto once = clean(t, 16);
    TokenStream again(once.bytes.begin(), once.bytes.end());
    const auto twice = clean(again, 16);
    CHECK(once.bytes == twice.bytes);
}

TEST_CASE("offset map points retained bytes at their source offsets") {
    // source:      0    1..16 (zeros)      17
    std::vector<uint8_t> src{0x11};
    for (int i = 0; i < 16; ++i) src.push_back(0x00);
    src.push_back(0x22);

    const auto r = clean(std::span<const uint8_t>(src), 16);
    REQUIRE(r.bytes.size() == 2);
    CHECK(map_to_source_offset(r.offsets, 0) == 0);
    CHECK(map_to_source_offset(r.offsets, 1) == 17);
}

TEST_CASE("byte 0x1B expands to ACGT most-significant pair first") {
    const auto seq = bytes_to_nucleotides("s", std::vector<uint8_t>{0x1B});
    CHECK(seq.bases == "ACGT");
    CHECK(bytes_to_nucleotides("s", std::vector<uint8_t>{0x00}).bases == "AAAA");
    CHECK(bytes_to_nucleotides("s", std::vector<uint8_t>{0xFF}).bases == "TTTT");
    CHECK(bytes_to_nucleotides("s", std::vector<uint8_t>{0xE4}).bases == "TGCA");
}

TEST_CASE("nucleotides_to_bytes rejects bad input") {
    CHECK_THROWS_AS(nucleotides_to_bytes("ACG"), error);     // not a multiple of 4
    CHECK_THROWS_AS(nucleotides_to_bytes("ACGN"), error);    // bad base
    CHECK(nucleotides_to_bytes("").empty());
}

TEST_CASE("encoding round-trips random byte arrays") {
    Rng rng(21);
    for (size_t len : {0u, 1u, 2u, 7u, 64u, 1000u}) {
        const auto bytes = random_bytes(rng, len);
        const auto seq = bytes_to_nucleotides("s", bytes);
        CHECK(seq.bases.size() == 4 * bytes.size());
        CHECK(nucleotides_to_bytes(seq.bases) == bytes);
    }
}

TEST_CASE("base offsets follow cleaning cuts") {
    std::vector<uint8_t> src{0x11};
    for (int i = 0; i < 16; ++i) src.push_back(0x00);
    src.push_back(0x22);
    const RawSample raw{"s", src, SampleOrigin::binary};
    const auto enc = encode_sample(raw, 16);

    REQUIRE(enc.seq.bases.size() == 8);  // two retained bytes
    CHECK(base_to_source_offset(enc.seq.offset_map, 0) == 0);
    CHECK(base_to_source_offset(enc.seq.offset_map, 3) == 0);
    CHECK(base_to_source_offset(enc.seq.offset_map, 4) == 17);
    CHECK(base_to_source_offset(enc.seq.offset_map, 7) == 17);
}

TEST_CASE("identity mapping needs no offset map") {
    const auto enc = encode_sample({"s", {0x10, 0x20, 0x30}, SampleOrigin::binary}, 16);
    CHECK(enc.seq.offset_map.empty());
    CHECK(base_to_source_offset(enc.seq.offset_map, 9) == 2);
}

TEST_CASE("encoder fingerprint pins the scheme and threshold") {
    CHECK(encoder_fingerprint(16) != encoder_fingerprint(32));
    CHECK(encoder_fingerprint(16) == encoder_fingerprint(16));
}

TEST_CASE("fasta round-trips sequences with wrapping") {
    std::vector<NucleotideSequence> seqs;
    Rng rng(22);
    std::string long_bases(200, 'A');
    for (auto& c : long_bases) c = "ACGT"[rng.below(4)];
    seqs.push_back({"alpha", "ACGT", {}});
    seqs.push_back({"beta", long_bases, {}});

    std::ostringstream out;
    write_fasta(seqs, out);
    const std::string text = out.str();

    // 200 bases wrap into 80 + 80 + 40.
    CHECK(text.find(">beta\n") != std::string::npos);
    std::istringstream in(text);
    const auto back = read_fasta(in, "t.fasta");
    REQUIRE(back.size() == 2);
    CHECK(back[0].id == "alpha");
    CHECK(back[0].bases == "ACGT");
    CHECK(back[1].bases == long_bases);

    size_t longest_line = 0, start = 0;
    for (size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            longest_line = std::max(longest_line, i - start);
            start = i + 1;
        }
    }
    CHECK(longest_line <= 80);
}

TEST_CASE("fasta read rejects stray characters with their position") {
    std::istringstream in(">x\nACGN\n");
    CHECK_THROWS_WITH_AS(read_fasta(in, "bad.fasta"), doctest::Contains("bad.fasta:2"),
                         parse_error);
    std::istringstream dup(">x\nAC\n>x\nGT\n");
    CHECK_THROWS_AS(read_fasta(dup, "dup.fasta"), parse_error);
    std::istringstream headless("ACGT\n");
    CHECK_THROWS_AS(read_fasta(headless, "h.fasta"), parse_error);
}

TEST_CASE("offset map sidecar round-trips") {
    const BaseOffsetMap map{{0, 0}, {64, 81}, {120, 400}};
    const std::string path = "offsets_roundtrip.tmp";
    write_offset_map(map, path);
    CHECK(read_offset_map(path) == map);
    std::remove(path.c_str());
}

TEST_SUITE_END();
