#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "doctest.h"
#include "malign/common.hpp"
#include "malign/explain.hpp"
#include "malign/signature.hpp"

using namespace malign;

namespace {

AlignmentBlock mk_aligned(int64_t id, const std::vector<std::string>& aligned) {
    AlignmentBlock b;
    b.block_id = id;
    for (size_t i = 0; i < aligned.size(); ++i) {
        BlockRow r;
        r.seq_id = "s" + std::to_string(i);
        int64_t gapless = 0;
        for (const char c : aligned[i]) gapless += (c != '-') ? 1 : 0;
        r.start = 0;
        r.end = gapless;
        r.src_size = gapless;
        r.aligned = aligned[i];
        b.rows.push_back(std::move(r));
    }
    return b;
}

BlockRow mk_row(const std::string& seq_id, int64_t start, int64_t end) {
    BlockRow r;
    r.seq_id = seq_id;
    r.start = start;
    r.end = end;
    r.src_size = end;
    r.aligned = std::string(size_t(end - start), 'A');
    return r;
}

Signature three_block_signature() {
    std::vector<AlignmentBlock> blocks;
    blocks.push_back(mk_aligned(1, {"GATT", "GATT", "GATT"}));
    blocks.push_back(mk_aligned(2, {"AAAA", "AAAA", "CCCC"}));
    blocks.push_back(mk_aligned(3, {"CGCG", "CGCG"}));
    return build_signature(blocks, "fam", encoder_fingerprint());
}

FamilyModel model_for(const Signature& sig, std::vector<double> weights) {
    FamilyModel m;
    m.family = sig.family;
    m.encoder_fingerprint = sig.fingerprint;
    m.feature_order = feature_order_fingerprint(sig);
    m.weights = std::move(weights);
    m.means.assign(m.weights.size(), 0.0);
    m.stds.assign(m.weights.size(), 1.0);
    return m;
}

}  // namespace

TEST_SUITE_BEGIN("explain");

TEST_CASE("blocks rank by alpha weight magnitude") {
    const auto sig = three_block_signature();
    const auto m = model_for(sig, {0.1, 0.0, -2.0, 0.9, 0.5, 0.0});

    const auto ranked = top_blocks(m, sig, 10);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].block_id == 2);
    CHECK(ranked[0].weight == -2.0);
    CHECK(ranked[1].block_id == 3);
    CHECK(ranked[1].weight == 0.5);
    CHECK(ranked[2].block_id == 1);

    // beta weights (0.9 on block 2) must not affect the ranking key
    CHECK(ranked[0].mean_gamma == 2.0 / 3.0);
    CHECK(ranked[1].mean_gamma == 1.0);
    CHECK(ranked[2].mean_gamma == 1.0);

    const auto top2 = top_blocks(m, sig, 2);
    REQUIRE(top2.size() == 2);
    CHECK(top2[0].block_id == 2);
    CHECK(top2[1].block_id == 3);
}

TEST_CASE("equal magnitudes break toward the smaller id") {
    const auto sig = three_block_signature();
    const auto m = model_for(sig, {-1.0, 0.0, 1.0, 0.0, 1.0, 0.0});
    const auto ranked = top_blocks(m, sig, 3);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].block_id == 1);
    CHECK(ranked[1].block_id == 2);
    CHECK(ranked[2].block_id == 3);
}

TEST_CASE("top_blocks rejects mismatched artifacts") {
    const auto sig = three_block_signature();
    auto m = model_for(sig, {0.1, 0.0, -2.0, 0.0, 0.5, 0.0});

    auto wrong_enc = m;
    wrong_enc.encoder_fingerprint = "2bit-msb;zrun=8";
    CHECK_THROWS_AS(top_blocks(wrong_enc, sig, 3), error);

    auto wrong_order = m;
    wrong_order.feature_order = "blocks:1,2";
    CHECK_THROWS_AS(top_blocks(wrong_order, sig, 3), error);

    auto short_weights = m;
    short_weights.weights.resize(4);
    CHECK_THROWS_AS(top_blocks(short_weights, sig, 3), error);
}

TEST_CASE("locate maps uncut coordinates by division") {
    AlignmentBlock b;
    b.block_id = 5;
    b.rows.push_back(mk_row("s0", 8, 28));
    b.rows.push_back(mk_row("s1", 9, 29));

    std::map<std::string, BaseOffsetMap> maps;
    maps["s0"] = {};
    maps["s1"] = {};

    const auto rows = locate(5, {b}, maps);
    REQUIRE(rows.size() == 2);

    CHECK(rows[0].seq_id == "s0");
    CHECK(rows[0].bases.begin == 8);
    CHECK(rows[0].bases.end == 28);
    CHECK(rows[0].bytes.begin == 2);
    CHECK(rows[0].bytes.end == 7);
    CHECK_FALSE(rows[0].cleaned_coords);
    CHECK_FALSE(rows[0].non_contiguous);

    // unaligned start straddles one extra byte
    CHECK(rows[1].bytes.begin == 2);
    CHECK(rows[1].bytes.end == 8);
    CHECK_FALSE(rows[1].non_contiguous);
}

TEST_CASE("cleaning cuts shift located bytes") {
    std::vector<uint8_t> bytes;
    for (int i = 1; i <= 10; ++i) bytes.push_back(uint8_t(i));
    bytes.insert(bytes.end(), 16, 0);
    for (int i = 11; i <= 20; ++i) bytes.push_back(uint8_t(i));

    RawSample raw{"s0", bytes, SampleOrigin::binary};
    const auto enc = encode_sample(raw);
    REQUIRE(enc.seq.bases.size() == 80);
    REQUIRE(base_to_source_offset(enc.seq.offset_map, 40) == 26);

    AlignmentBlock b;
    b.block_id = 1;
    b.rows.push_back(mk_row("s0", 40, 80));  // entirely after the cut
    b.rows.push_back(mk_row("s0", 0, 80));   // spans the cut

    std::map<std::string, BaseOffsetMap> maps;
    maps["s0"] = enc.seq.offset_map;

    const auto rows = locate(1, {b}, maps);
    REQUIRE(rows.size() == 2);

    // naive division would say byte 10; the 16 cleaned zeros push it to 26
    CHECK(rows[0].bytes.begin == 26);
    CHECK(rows[0].bytes.end == 36);
    CHECK_FALSE(rows[0].cleaned_coords);
    CHECK_FALSE(rows[0].non_contiguous);

    CHECK(rows[1].bytes.begin == 0);
    CHECK(rows[1].bytes.end == 36);
    CHECK(rows[1].non_contiguous);

    // the reported interval re-encodes to the row's bases
    const std::span<const uint8_t> cut(bytes.data() + rows[0].bytes.begin,
                                       size_t(rows[0].bytes.length()));
    const auto re = bytes_to_nucleotides("cut", cut);
    CHECK(re.bases == enc.seq.bases.substr(40, 40));
}

TEST_CASE("re-encoded interval covers unaligned spans") {
    std::vector<uint8_t> bytes;
    Rng rng(4242);
    for (int i = 0; i < 12; ++i) bytes.push_back(uint8_t(1 + rng.below(255)));
    bytes.insert(bytes.end(), 20, 0);
    for (int i = 0; i < 14; ++i) bytes.push_back(uint8_t(1 + rng.below(255)));

    RawSample raw{"x", bytes, SampleOrigin::binary};
    const auto enc = encode_sample(raw);
    REQUIRE(enc.seq.bases.size() == 26 * 4);

    AlignmentBlock b;
    b.block_id = 9;
    b.rows.push_back(mk_row("x", 51, 97));  // inside the post-cut segment, off-grid ends

    std::map<std::string, BaseOffsetMap> maps;
    maps["x"] = enc.seq.offset_map;
    const auto rows = locate(9, {b}, maps);
    REQUIRE(rows.size() == 1);
    CHECK_FALSE(rows[0].non_contiguous);

    const auto& r = rows[0];
    const std::span<const uint8_t> cut(bytes.data() + r.bytes.begin, size_t(r.bytes.length()));
    const auto re = bytes_to_nucleotides("cut", cut);
    const size_t lead = size_t(r.bases.begin % 4);
    CHECK(re.bases.substr(lead, size_t(r.bases.length())) ==
          enc.seq.bases.substr(size_t(r.bases.begin), size_t(r.bases.length())));
}

TEST_CASE("missing offset map falls back to cleaned coordinates") {
    AlignmentBlock b;
    b.block_id = 3;
    b.rows.push_back(mk_row("absent", 16, 40));

    const auto rows = locate(3, {b}, {});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].cleaned_coords);
    CHECK(rows[0].bytes.begin == 4);
    CHECK(rows[0].bytes.end == 10);
    CHECK_FALSE(rows[0].non_contiguous);
}

TEST_CASE("unknown block id is an error") {
    AlignmentBlock b;
    b.block_id = 3;
    b.rows.push_back(mk_row("s0", 0, 8));
    CHECK_THROWS_WITH_AS(locate(4, {b}, {}), doctest::Contains("block 4"), error);
}

TEST_CASE("trace table lists rows in ranked order") {
    std::vector<RankedBlock> ranked = {{2, -2.0, 1.0}, {1, 0.5, 2.0 / 3.0}};
    std::vector<LocatedRow> rows;
    rows.push_back({1, "s0", {0, 8}, {0, 2}, false, false});
    rows.push_back({2, "s0", {8, 16}, {18, 20}, false, true});
    rows.push_back({2, "s1", {4, 12}, {1, 3}, true, false});

    const auto path = (std::filesystem::temp_directory_path() / "malign_trace_test.csv").string();
    write_trace_csv(path, ranked, rows);
    const auto text = read_text_file(path);
    std::filesystem::remove(path);

    CHECK(text ==
          "block_id,weight,mean_gamma,seq_id,base_begin,base_end,byte_begin,byte_end,"
          "cleaned_coords,non_contiguous\n"
          "2,-2,1.000000,s0,8,16,18,20,0,1\n"
          "2,-2,1.000000,s1,4,12,1,3,1,0\n"
          "1,0.5,0.666667,s0,0,8,0,2,0,0\n");
}

TEST_SUITE_END();
