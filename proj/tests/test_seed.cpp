#include <doctest.h>

#include <string>

#include "malign/common.hpp"
#include "malign/seed.hpp"

using namespace malign;

namespace {

std::string random_bases(Rng& rng, size_t n) {
    std::string s(n, 'A');
    for (auto& c : s) c = "ACGT"[rng.below(4)];
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("seed");

TEST_CASE("identical sequences give one full-length anchor") {
    Rng rng(41);
    const std::string s = random_bases(rng, 400);
    const auto anchors = find_anchors(s, s, 15);
    REQUIRE(anchors.size() == 1);
    CHECK(anchors[0].a_pos == 0);
    CHECK(anchors[0].b_pos == 0);
    CHECK(anchors[0].len == 400);
}

TEST_CASE("unrelated random sequences give no anchors") {
    Rng rng(42);
    const std::string a = random_bases(rng, 1000);
    const std::string b = random_bases(rng, 1000);
    CHECK(find_anchors(a, b, 15).empty());
}

TEST_CASE("a planted block anchors only inside its span") {
    Rng rng(43);
    const std::string block = random_bases(rng, 200);
    std::string a = random_bases(rng, 500) + block + random_bases(rng, 500);
    std::string b = random_bases(rng, 300) + block + random_bases(rng, 300);
    // Pin mismatches at the block edges so no anchor can luck past them.
    a[499] = 'A';
    b[299] = 'C';
    a[700] = 'G';
    b[500] = 'T';
    const auto anchors = find_anchors(a, b, 15);
    REQUIRE(!anchors.empty());
    for (const auto& an : anchors) {
        CHECK(an.a_pos >= 500);
        CHECK(an.a_end() <= 700);
        CHECK(an.b_pos >= 300);
        CHECK(an.b_end() <= 500);
    }
}

TEST_CASE("seed length bounds are enforced") {
    CHECK_THROWS_AS(find_anchors("ACGT", "ACGT", 4), error);
    CHECK_THROWS_AS(find_anchors("ACGT", "ACGT", 40), error);
}

TEST_CASE("max_occ suppresses repeat seeds") {
    std::string rep;
    for (int i = 0; i < 100; ++i) rep += "ACGT";
    CHECK(find_anchors(rep, rep, 8, 4).empty());
    CHECK(!find_anchors(rep, rep, 8, 0).empty());
}

TEST_CASE("swapped halves chain into two separate blocks") {
    Rng rng(44);
    const std::string x = random_bases(rng, 300);
    const std::string y = random_bases(rng, 260);
    const std::string a = x + y;
    const std::string b = y + x;
    const auto chains = chain_anchors(find_anchors(a, b, 15));
    REQUIRE(chains.size() == 2);
    // Best chain covers x, the other covers y; co-linear order differs.
    CHECK(chains[0].anchored == 300);
    CHECK(chains[1].anchored == 260);
    CHECK(chains[0].a.begin == 0);
    CHECK(chains[0].b.begin == 260);
    CHECK(chains[1].a.begin == 300);
    CHECK(chains[1].b.begin == 0);
}

TEST_CASE("chaining respects the gap limit") {
    Rng rng(45);
    const std::string m1 = random_bases(rng, 60);
    const std::string m2 = random_bases(rng, 60);
    // Same order in both sequences, but separated by far more than max_gap.
    std::string a = m1 + random_bases(rng, 500) + m2;
    std::string b = m1 + random_bases(rng, 480) + m2;
    // Pin mismatches right after m1 (diagonal 0) and before m2 so anchors
    // cannot luck a base past the motif edges.
    a[60] = 'A';
    b[60] = 'C';
    a[559] = 'G';
    b[539] = 'T';
    const auto chains = chain_anchors(find_anchors(a, b, 15), 100, 1);
    CHECK(chains.size() == 2);
    const auto joined = chain_anchors(find_anchors(a, b, 15), 1000, 1);
    CHECK(joined.size() == 1);
    CHECK(joined[0].anchored == 120);
}

TEST_CASE("mutations split anchors but not the chain") {
    Rng rng(46);
    std::string block = random_bases(rng, 300);
    const std::string a = random_bases(rng, 200) + block + random_bases(rng, 200);
    // 2% substitutions.
    for (int i = 0; i < 6; ++i) {
        const size_t pos = rng.below(block.size());
        block[pos] = block[pos] == 'A' ? 'G' : 'A';
    }
    const std::string b = random_bases(rng, 100) + block + random_bases(rng, 100);
    const auto chains = chain_anchors(find_anchors(a, b, 15));
    REQUIRE(!chains.empty());
    CHECK(chains[0].anchors.size() >= 2);
    CHECK(chains[0].a.begin >= 200 - 15);
    CHECK(chains[0].a.end <= 500 + 15);
}

TEST_CASE("seeded local alignment recovers identity in one piece") {
    Rng rng(47);
    const std::string s = random_bases(rng, 5000);
    const auto als = seeded_local_align(s, s, ScoringParams{}, 15, 30);
    REQUIRE(als.size() == 1);
    CHECK(als[0].score == 5000);
    CHECK(als[0].a.begin == 0);
    CHECK(als[0].a.end == 5000);
    CHECK(als[0].b.begin == 0);
}

TEST_CASE("seeded local alignment finds a planted block in noise") {
    Rng rng(48);
    const std::string block = random_bases(rng, 300);
    const std::string a = random_bases(rng, 2000) + block + random_bases(rng, 2000);
    const std::string b = random_bases(rng, 1500) + block + random_bases(rng, 1500);
    const auto als = seeded_local_align(a, b, ScoringParams{}, 15, 100);
    REQUIRE(als.size() == 1);
    CHECK(als[0].score >= 295);
    CHECK(als[0].a.begin >= 2000 - 15);
    CHECK(als[0].a.end <= 2300 + 15);
    CHECK(als[0].b.begin >= 1500 - 15);
    CHECK(als[0].b.end <= 1800 + 15);
}

TEST_CASE("seeded agrees with exhaustive local alignment on seedable input") {
    Rng rng(49);
    const std::string block = random_bases(rng, 200);
    const std::string a = random_bases(rng, 600) + block + random_bases(rng, 600);
    const std::string b = random_bases(rng, 400) + block + random_bases(rng, 400);
    const auto fast = seeded_local_align(a, b, ScoringParams{}, 15, 100);
    const auto slow = local_align(a, b, ScoringParams{}, 100);
    REQUIRE(fast.size() == slow.size());
    REQUIRE(fast.size() == 1);
    CHECK(fast[0].score == slow[0].score);
    CHECK(fast[0].a.begin == slow[0].a.begin);
    CHECK(fast[0].a.end == slow[0].a.end);
    CHECK(fast[0].b.begin == slow[0].b.begin);
}

TEST_CASE("seeded local alignment is deterministic") {
    Rng rng(50);
    const std::string block = random_bases(rng, 250);
    const std::string a = random_bases(rng, 1000) + block + random_bases(rng, 1000);
    const std::string b = random_bases(rng, 800) + block + random_bases(rng, 800);
    const auto r1 = seeded_local_align(a, b, ScoringParams{});
    const auto r2 = seeded_local_align(a, b, ScoringParams{});
    REQUIRE(r1.size() == r2.size());
    for (size_t i = 0; i < r1.size(); ++i) {
        CHECK(r1[i].score == r2[i].score);
        CHECK(r1[i].a_aligned == r2[i].a_aligned);
    }
}

TEST_SUITE_END();
