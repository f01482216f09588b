#include "malign/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "malign/common.hpp"
#include "malign/nucleotide.hpp"

namespace malign {

namespace {

size_t growth(double magnitude, size_t n) {
    return size_t(std::ceil(magnitude * double(n)));
}

// Contiguous donor run of exactly `want` bytes, wrapping inside one pool
// member when it is too short.
std::vector<uint8_t> donor_run(Rng& rng, const std::vector<std::vector<uint8_t>>& pool,
                               size_t want) {
    const auto& src = pool[rng.below(pool.size())];
    std::vector<uint8_t> run;
    run.reserve(want);
    size_t at = rng.below(src.size());
    while (run.size() < want) {
        run.push_back(src[at]);
        at = (at + 1) % src.size();
    }
    return run;
}

std::vector<uint8_t> pad_append(const std::vector<uint8_t>& bytes, double magnitude, Rng& rng) {
    std::vector<uint8_t> out = bytes;
    const size_t extra = growth(magnitude, bytes.size());
    out.reserve(out.size() + extra);
    for (size_t i = 0; i < extra; ++i) out.push_back(rng.byte());
    return out;
}

std::vector<uint8_t> intersperse(const std::vector<uint8_t>& bytes, double magnitude, Rng& rng,
                                 const std::vector<std::vector<uint8_t>>& pool) {
    size_t budget = growth(magnitude, bytes.size());

    // Random cut points, each receiving a benign chunk of up to 512 bytes.
    struct Insert {
        size_t at;
        std::vector<uint8_t> chunk;
    };
    std::vector<Insert> inserts;
    while (budget > 0) {
        const size_t take = std::min<size_t>(budget, 1 + rng.below(512));
        inserts.push_back({size_t(rng.below(bytes.size() + 1)), donor_run(rng, pool, take)});
        budget -= take;
    }
    std::sort(inserts.begin(), inserts.end(),
              [](const Insert& x, const Insert& y) { return x.at < y.at; });

    std::vector<uint8_t> out;
    out.reserve(bytes.size() + growth(magnitude, bytes.size()));
    size_t next = 0;
    for (size_t i = 0; i <= bytes.size(); ++i) {
        while (next < inserts.size() && inserts[next].at == i) {
            out.insert(out.end(), inserts[next].chunk.begin(), inserts[next].chunk.end());
            ++next;
        }
        if (i < bytes.size()) out.push_back(bytes[i]);
    }
    return out;
}

std::vector<uint8_t> shuffle_blocks(const std::vector<uint8_t>& bytes, Rng& rng) {
    std::vector<std::pair<size_t, size_t>> chunks;  // [begin, end)
    for (size_t at = 0; at < bytes.size(); at += kShuffleChunk) {
        chunks.emplace_back(at, std::min(bytes.size(), at + kShuffleChunk));
    }
    rng.shuffle(chunks);
    std::vector<uint8_t> out;
    out.reserve(bytes.size());
    for (const auto& [b, e] : chunks) out.insert(out.end(), bytes.begin() + b, bytes.begin() + e);
    return out;
}

std::vector<uint8_t> substitute(const std::vector<uint8_t>& bytes, double rate, Rng& rng) {
    std::vector<uint8_t> out = bytes;
    // Complement, not a random redraw: flipped stretches anti-align against
    // any signature instead of keeping a quarter of their bases by chance.
    for (auto& b : out) {
        if (rng.real() < rate) b = uint8_t(~b);
    }
    return out;
}

std::vector<uint8_t> inject(const std::vector<uint8_t>& bytes, double magnitude, Rng& rng,
                            const std::vector<std::vector<uint8_t>>& pool) {
    const size_t want = growth(magnitude, bytes.size());
    const auto run = donor_run(rng, pool, want);
    const size_t at = rng.below(bytes.size() + 1);
    std::vector<uint8_t> out;
    out.reserve(bytes.size() + want);
    out.insert(out.end(), bytes.begin(), bytes.begin() + at);
    out.insert(out.end(), run.begin(), run.end());
    out.insert(out.end(), bytes.begin() + at, bytes.end());
    return out;
}

}  // namespace

MutationKind mutation_kind_from_string(const std::string& s) {
    if (s == "pad_append") return MutationKind::pad_append;
    if (s == "intersperse") return MutationKind::intersperse;
    if (s == "shuffle_blocks") return MutationKind::shuffle_blocks;
    if (s == "substitute") return MutationKind::substitute;
    if (s == "cross_family_inject") return MutationKind::cross_family_inject;
    throw error("unknown mutation kind '" + s + "'");
}

std::string to_string(MutationKind kind) {
    switch (kind) {
        case MutationKind::pad_append: return "pad_append";
        case MutationKind::intersperse: return "intersperse";
        case MutationKind::shuffle_blocks: return "shuffle_blocks";
        case MutationKind::substitute: return "substitute";
        case MutationKind::cross_family_inject: return "cross_family_inject";
    }
    throw error("unknown mutation kind");
}

std::vector<uint8_t> mutate(const std::vector<uint8_t>& bytes, const MutationSpec& spec,
                            const std::vector<std::vector<uint8_t>>& pool) {
    if (bytes.empty()) throw error("mutate: empty sample");
    if (!(spec.magnitude > 0.0 && spec.magnitude <= 1.0)) {
        throw error("mutate: magnitude must be in (0,1]");
    }
    if (spec.kind == MutationKind::intersperse || spec.kind == MutationKind::cross_family_inject) {
        bool have_donor = false;
        for (const auto& p : pool) have_donor = have_donor || !p.empty();
        if (!have_donor) {
            throw error("mutate: " + to_string(spec.kind) + " needs a non-empty donor pool");
        }
    }

    // Empty pool members would make donor selection loop; drop them up front.
    std::vector<std::vector<uint8_t>> donors;
    for (const auto& p : pool) {
        if (!p.empty()) donors.push_back(p);
    }

    Rng rng(spec.seed);
    switch (spec.kind) {
        case MutationKind::pad_append: return pad_append(bytes, spec.magnitude, rng);
        case MutationKind::intersperse: return intersperse(bytes, spec.magnitude, rng, donors);
        case MutationKind::shuffle_blocks: return shuffle_blocks(bytes, rng);
        case MutationKind::substitute: return substitute(bytes, spec.magnitude, rng);
        case MutationKind::cross_family_inject: return inject(bytes, spec.magnitude, rng, donors);
    }
    throw error("unknown mutation kind");
}

RobustnessReport evaluate_robustness(const std::vector<FamilyDetector>& detectors,
                                     const std::vector<AdvSample>& samples,
                                     const std::vector<MutationSpec>& specs,
                                     const std::vector<std::vector<uint8_t>>& pool,
                                     size_t zero_run, const FeaturizeParams& fparams) {
    RobustnessReport report;
    for (const auto& spec : specs) {
        RobustnessRow row;
        row.spec = spec;
        for (const auto& s : samples) {
            const auto mutated = mutate(s.bytes, spec, pool);
            RawSample raw;
            raw.id = s.id;
            raw.bytes = mutated;
            const auto enc = encode_sample(raw, zero_run);
            const auto det = detect(enc.seq, detectors, fparams);
            ++row.total;
            if (det.benign || det.family != s.family) ++row.evaded;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

void write_robustness_csv(const RobustnessReport& report, const std::string& path) {
    std::string out = "kind,magnitude,seed,evaded,total,evasion_rate\n";
    for (const auto& row : report.rows) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s,%g,%llu,%lld,%lld,%.6f\n",
                      to_string(row.spec.kind).c_str(), row.spec.magnitude,
                      (unsigned long long)row.spec.seed, (long long)row.evaded,
                      (long long)row.total, row.rate());
        out += buf;
    }
    write_text_file(path, out);
}

}  // namespace malign
