#include <cmath>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "malign/common.hpp"
#include "malign/signature.hpp"

using namespace malign;

namespace {

AlignmentBlock mk_block(int64_t id, const std::vector<std::string>& aligned) {
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

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string str() const { return path.string(); }
};

}  // namespace

TEST_SUITE_BEGIN("signature");

TEST_CASE("identical rows give unit conservation") {
    const auto b = mk_block(1, {"GATT", "GATT", "GATT"});
    const auto c = build_consensus(b);
    CHECK(c.bases == "GATT");
    CHECK(c.n_rows == 3);
    REQUIRE(c.gamma.size() == 4);
    // G A T T -> planes G, A, T, T
    const int expect[4] = {2, 0, 3, 3};
    for (size_t p = 0; p < 4; ++p) {
        for (int v = 0; v < 4; ++v) {
            CHECK(c.gamma[p][v] == (v == expect[p] ? 1.0 : 0.0));
        }
        CHECK(c.column_map[p] == static_cast<int64_t>(p));
    }
}

TEST_CASE("majority vote with exact fractional scores") {
    // Column 0: three G. Column 5: two T, one A.
    const auto b = mk_block(1, {"GCCGAT", "GCCGAT", "GCCGAA"});
    const auto c = build_consensus(b);
    CHECK(c.bases == "GCCGAT");
    CHECK(c.gamma[0][2] == 1.0);
    CHECK(c.gamma[5][3] == 2.0 / 3.0);
    CHECK(c.gamma[5][0] == 1.0 / 3.0);
    CHECK(c.gamma[5][1] == 0.0);
    CHECK(c.gamma[5][2] == 0.0);
}

TEST_CASE("argmax tie breaks to the alphabetically first base") {
    // Column: A, C, gap. Tie between A and C; gap is not a candidate.
    const auto b = mk_block(1, {"AA", "AC", "A-"});
    const auto c = build_consensus(b);
    REQUIRE(c.bases.size() == 2);
    CHECK(c.bases[1] == 'A');
    CHECK(c.gamma[1][0] == 1.0 / 3.0);
    CHECK(c.gamma[1][1] == 1.0 / 3.0);

    const auto b2 = mk_block(2, {"GG", "GT", "G-"});
    CHECK(build_consensus(b2).bases[1] == 'G');
}

TEST_CASE("gap-majority columns are dropped and column_map tracks survivors") {
    // n=3: column 1 has 2 gaps (dropped), column 3 has 1 gap (kept).
    const auto b = mk_block(1, {"A-CT", "A-C-", "AGCT"});
    const auto c = build_consensus(b);
    CHECK(c.bases == "ACT");
    REQUIRE(c.column_map.size() == 3);
    CHECK(c.column_map[0] == 0);
    CHECK(c.column_map[1] == 2);
    CHECK(c.column_map[2] == 3);
    CHECK(c.gamma[2][3] == 2.0 / 3.0);

    // n=4: exactly half gaps is not a majority.
    const auto b4 = mk_block(2, {"A-", "A-", "AC", "AC"});
    const auto c4 = build_consensus(b4);
    CHECK(c4.bases == "AC");
}

TEST_CASE("row order does not matter") {
    const std::vector<std::string> rows{"ACGT-C", "AC-TTC", "GCGTAC", "ACGA-C"};
    auto perm = rows;
    std::swap(perm[0], perm[3]);
    std::swap(perm[1], perm[2]);
    const auto c1 = build_consensus(mk_block(1, rows));
    const auto c2 = build_consensus(mk_block(1, perm));
    CHECK(c1.bases == c2.bases);
    CHECK(c1.column_map == c2.column_map);
    REQUIRE(c1.gamma.size() == c2.gamma.size());
    for (size_t p = 0; p < c1.gamma.size(); ++p) CHECK(c1.gamma[p] == c2.gamma[p]);
}

TEST_CASE("gamma rows are exact multiples of 1/n and consensus attains the max") {
    Rng rng(77);
    const char alpha[5] = {'A', 'C', 'G', 'T', '-'};
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(7));
        const int w = 1 + static_cast<int>(rng.below(40));
        std::vector<std::string> rows(n);
        for (auto& r : rows) {
            for (int j = 0; j < w; ++j) r.push_back(alpha[rng.below(5)]);
        }
        const auto c = build_consensus(mk_block(1, rows));
        for (size_t p = 0; p < c.gamma.size(); ++p) {
            double row_max = 0.0;
            double total = 0.0;
            for (int v = 0; v < 4; ++v) {
                const double g = c.gamma[p][v];
                const double k = g * n;
                CHECK(std::abs(k - std::round(k)) < 1e-9);
                row_max = std::max(row_max, g);
                total += g;
            }
            CHECK(total <= 1.0 + 1e-12);
            const int ci = std::string("ACGT").find(c.bases[p]);
            CHECK(c.gamma[p][ci] == row_max);
        }
    }
}

TEST_CASE("single-row blocks are rejected") {
    CHECK_THROWS_AS(build_consensus(mk_block(1, {"ACGT"})), error);
}

TEST_CASE("build_signature sorts blocks by id") {
    const std::vector<AlignmentBlock> blocks{mk_block(3, {"AC", "AC"}), mk_block(1, {"GT", "GT"})};
    const auto sig = build_signature(blocks, "fam", "2bit-msb;zrun=16");
    REQUIRE(sig.blocks.size() == 2);
    CHECK(sig.blocks[0].block_id == 1);
    CHECK(sig.blocks[1].block_id == 3);
}

TEST_CASE("signature round trip through disk") {
    const std::vector<AlignmentBlock> blocks{
        mk_block(1, {"GCCGAT", "GCCGAT", "GCCGAA"}),
        mk_block(2, {"A-CT", "A-C-", "AGCT"}),
    };
    const auto sig = build_signature(blocks, "famX", "2bit-msb;zrun=16");
    TempDir dir("malign_sig_rt");
    save_signature(sig, dir.str());

    const auto back = load_signature(dir.str());
    CHECK(back.family == sig.family);
    CHECK(back.fingerprint == sig.fingerprint);
    REQUIRE(back.blocks.size() == sig.blocks.size());
    for (size_t i = 0; i < back.blocks.size(); ++i) {
        CHECK(back.blocks[i].block_id == sig.blocks[i].block_id);
        CHECK(back.blocks[i].n_rows == sig.blocks[i].n_rows);
        CHECK(back.blocks[i].bases == sig.blocks[i].bases);
        CHECK(back.blocks[i].column_map == sig.blocks[i].column_map);
        REQUIRE(back.blocks[i].gamma.size() == sig.blocks[i].gamma.size());
        for (size_t p = 0; p < back.blocks[i].gamma.size(); ++p) {
            for (int v = 0; v < 4; ++v) {
                // Sidecar stores 6 decimals; half a quantum each way.
                CHECK(std::abs(back.blocks[i].gamma[p][v] - sig.blocks[i].gamma[p][v]) <= 5e-7);
            }
        }
    }

    // A second save of the loaded signature reproduces the files byte for byte.
    TempDir dir2("malign_sig_rt2");
    save_signature(back, dir2.str());
    CHECK(read_text_file(dir.str() + "/consensus.fasta") ==
          read_text_file(dir2.str() + "/consensus.fasta"));
    CHECK(read_text_file(dir.str() + "/consensus.gamma") ==
          read_text_file(dir2.str() + "/consensus.gamma"));
}

TEST_CASE("empty signature is valid") {
    Signature sig;
    sig.family = "fam";
    sig.fingerprint = "2bit-msb;zrun=16";
    TempDir dir("malign_sig_empty");
    save_signature(sig, dir.str());
    const auto back = load_signature(dir.str());
    CHECK(back.family == "fam");
    CHECK(back.blocks.empty());
}

TEST_CASE("tampered signature files fail to load") {
    const std::vector<AlignmentBlock> blocks{mk_block(1, {"GCCGAT", "GCCGAT", "GCCGAA"})};
    const auto sig = build_signature(blocks, "famX", "2bit-msb;zrun=16");

    auto corrupt = [&](auto&& mutate) {
        TempDir dir("malign_sig_tamper");
        save_signature(sig, dir.str());
        mutate(dir.str());
        CHECK_THROWS_AS(load_signature(dir.str()), parse_error);
    };

    // Drop the last gamma row.
    corrupt([](const std::string& d) {
        auto text = read_text_file(d + "/consensus.gamma");
        text.erase(text.rfind('\n', text.size() - 2) + 1);
        write_text_file(d + "/consensus.gamma", text);
    });
    // Gamma row for a block the FASTA does not know.
    corrupt([](const std::string& d) {
        auto text = read_text_file(d + "/consensus.gamma");
        text += "9 0 1.000000 0.000000 0.000000 0.000000\n";
        write_text_file(d + "/consensus.gamma", text);
    });
    // Fraction out of range.
    corrupt([](const std::string& d) {
        auto text = read_text_file(d + "/consensus.gamma");
        const auto at = text.find("0.666667");
        text.replace(at, 8, "1.666667");
        write_text_file(d + "/consensus.gamma", text);
    });
    // Truncated column map.
    corrupt([](const std::string& d) {
        auto text = read_text_file(d + "/consensus.gamma");
        const auto at = text.find("# colmap 1 0 1 2 3 4 5");
        REQUIRE(at != std::string::npos);
        text.replace(at, 22, "# colmap 1 0 1 2 3 4");
        write_text_file(d + "/consensus.gamma", text);
    });
    // Family header gone.
    corrupt([](const std::string& d) {
        auto text = read_text_file(d + "/consensus.gamma");
        const auto at = text.find("# family famX\n");
        text.erase(at, 14);
        write_text_file(d + "/consensus.gamma", text);
    });
    // Consensus text shorter than the gamma table says.
    corrupt([](const std::string& d) {
        auto text = read_text_file(d + "/consensus.fasta");
        const auto at = text.find("GCCGAT");
        text.replace(at, 6, "GCCGA\n");
        write_text_file(d + "/consensus.fasta", text);
    });
}

TEST_CASE("save rejects malformed signatures") {
    Signature dup;
    dup.family = "f";
    dup.fingerprint = "fp";
    dup.blocks.resize(2);
    dup.blocks[0].block_id = 1;
    dup.blocks[1].block_id = 1;
    TempDir dir("malign_sig_badsave");
    CHECK_THROWS_AS(save_signature(dup, dir.str()), error);

    Signature skew;
    skew.family = "f";
    skew.fingerprint = "fp";
    skew.blocks.resize(1);
    skew.blocks[0].block_id = 1;
    skew.blocks[0].bases = "AC";
    skew.blocks[0].gamma.resize(1);
    skew.blocks[0].column_map = {0, 1};
    CHECK_THROWS_AS(save_signature(skew, dir.str()), error);
}

TEST_SUITE_END();
