#include "malign/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <thread>

#include "malign/fasta.hpp"
#include "malign/maf.hpp"
#include "malign/signature.hpp"
#include "malign/toml.hpp"

namespace fs = std::filesystem;

namespace malign {

namespace {

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (char c : s) {
        h ^= uint8_t(c);
        h *= 1099511628211ull;
    }
    return h;
}

bool safe_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!(std::isalnum(uint8_t(c)) || c == '_' || c == '-')) return false;
    }
    return true;
}

// Wraps stage failures with the stage and family; missing inputs pass
// through so the CLI can keep its usage exit code.
template <typename F>
auto stage(const char* name, const std::string& family, F&& f) {
    try {
        return f();
    } catch (const missing_input_error&) {
        throw;
    } catch (const error& e) {
        throw error(std::string(name) + " (" + family + "): " + e.what());
    }
}

std::vector<EncodedSample> encode_dir(const std::string& dir, const std::string& format,
                                      size_t zero_run) {
    if (!fs::is_directory(dir)) throw missing_input_error(dir);
    const auto files = list_files(dir);
    if (files.empty()) throw error("no input files in " + dir);
    std::vector<EncodedSample> out;
    out.reserve(files.size());
    for (const auto& path : files) {
        if (format == "bytes") {
            out.push_back(encode_tokens(file_stem(path), parse_hexdump(read_text_file(path), path),
                                        zero_run));
        } else {
            RawSample raw{file_stem(path), read_binary_file(path), SampleOrigin::binary};
            out.push_back(encode_sample(raw, zero_run));
        }
    }
    std::sort(out.begin(), out.end(),
              [](const EncodedSample& a, const EncodedSample& b) { return a.seq.id < b.seq.id; });
    return out;
}

// Same per-sample files the encode subcommand writes.
void write_encoded(const std::string& dir, const std::vector<EncodedSample>& all,
                   const std::vector<size_t>& pick) {
    fs::create_directories(dir);
    for (size_t i : pick) {
        const auto& seq = all[i].seq;
        write_fasta({seq}, dir + "/" + seq.id + ".fasta");
        write_offset_map(seq.offset_map, dir + "/" + seq.id + ".offsets");
    }
}

std::vector<size_t> sorted_by_id(const std::vector<EncodedSample>& all, std::vector<size_t> pick) {
    std::sort(pick.begin(), pick.end(),
              [&](size_t a, size_t b) { return all[a].seq.id < all[b].seq.id; });
    return pick;
}

void validate(const PipelineConfig& cfg) {
    if (cfg.families.empty()) throw error("config: no families given");
    for (const auto& f : cfg.families) {
        if (!safe_name(f.name)) throw error("config: bad family name '" + f.name + "'");
        if (f.positives.empty()) throw error("config: family '" + f.name + "' has no positives dir");
    }
    for (size_t i = 0; i + 1 < cfg.families.size(); ++i) {
        for (size_t j = i + 1; j < cfg.families.size(); ++j) {
            if (cfg.families[i].name == cfg.families[j].name) {
                throw error("config: duplicate family '" + cfg.families[i].name + "'");
            }
        }
    }
    if (cfg.negatives.empty()) throw error("config: negatives dir is required");
    if (!(cfg.split > 0.0 && cfg.split <= 1.0)) throw error("config: split must be in (0, 1]");
    if (cfg.format != "bytes" && cfg.format != "bin") {
        throw error("config: format must be 'bytes' or 'bin'");
    }
    if (cfg.jobs < 1) throw error("config: jobs must be >= 1");
    if (cfg.zero_run < 1) throw error("config: zero_run must be >= 1");
}

struct FamilyOutcome {
    FamilyReport report;
    FamilyDetector detector;
    std::vector<size_t> test_pos;  // indices into the family's encoded samples
    std::vector<EncodedSample> encoded;
};

}  // namespace

PipelineConfig load_pipeline_config(const std::string& path) {
    if (!fs::is_regular_file(path)) throw missing_input_error(path);
    const TomlDoc doc = read_toml_file(path);

    PipelineConfig cfg;
    const auto& p = doc.table("pipeline");
    if (!p.has("seed")) throw error("config: [pipeline] seed is required");
    cfg.seed = uint64_t(p.get_int("seed"));
    if (!p.has("negatives")) throw error("config: [pipeline] negatives is required");
    cfg.negatives = p.get_string("negatives");
    cfg.out = p.get_string("out", cfg.out);
    cfg.format = p.get_string("format", cfg.format);
    cfg.split = p.get_double("split", cfg.split);
    cfg.zero_run = size_t(p.get_int("zero_run", int64_t(cfg.zero_run)));
    cfg.jobs = int(p.get_int("jobs", cfg.jobs));

    for (const auto& name : doc.children("family")) {
        const auto& t = doc.table("family." + name);
        if (!t.has("positives")) throw error("config: [family." + name + "] needs positives");
        cfg.families.push_back({name, t.get_string("positives")});
    }

    const auto& b = doc.table("blocks");
    cfg.blocks.k = int(b.get_int("k", cfg.blocks.k));
    cfg.blocks.max_gap = b.get_int("max_gap", cfg.blocks.max_gap);
    cfg.blocks.min_block_len = b.get_int("min_len", cfg.blocks.min_block_len);
    cfg.blocks.min_support = size_t(b.get_int("min_support", int64_t(cfg.blocks.min_support)));
    cfg.blocks.band = b.get_int("band", cfg.blocks.band);

    const auto& ft = doc.table("featurize");
    cfg.featurize.k = int(ft.get_int("k", cfg.featurize.k));
    cfg.featurize.min_score = ft.get_int("min_score", cfg.featurize.min_score);
    cfg.featurize.band = ft.get_int("band", cfg.featurize.band);

    const auto& tr = doc.table("train");
    cfg.train.c = tr.get_double("c", cfg.train.c);
    cfg.train.l1_ratio = tr.get_double("l1_ratio", cfg.train.l1_ratio);
    cfg.train.threshold = tr.get_double("threshold", cfg.train.threshold);
    cfg.train.tol = tr.get_double("tol", cfg.train.tol);
    cfg.train.max_epochs = tr.get_int("max_epochs", cfg.train.max_epochs);
    return cfg;
}

PipelineReport run_pipeline(const PipelineConfig& cfg) {
    validate(cfg);
    fs::create_directories(cfg.out);
    const std::string fp = encoder_fingerprint(cfg.zero_run);

    log_info("encoding negative pool from " + cfg.negatives);
    const auto negs = stage("encode", "negatives",
                            [&] { return encode_dir(cfg.negatives, cfg.format, cfg.zero_run); });
    {
        std::vector<size_t> all(negs.size());
        for (size_t i = 0; i < all.size(); ++i) all[i] = i;
        write_encoded(cfg.out + "/negatives/fasta", negs, all);
    }

    std::vector<size_t> neg_order(negs.size());
    for (size_t i = 0; i < neg_order.size(); ++i) neg_order[i] = i;
    Rng neg_rng(cfg.seed ^ fnv1a("negatives"));
    neg_rng.shuffle(neg_order);
    const size_t n_neg_train =
        std::min(negs.size(), size_t(std::llround(cfg.split * double(negs.size()))));
    const std::vector<size_t> neg_train(neg_order.begin(), neg_order.begin() + n_neg_train);
    const std::vector<size_t> neg_test(neg_order.begin() + n_neg_train, neg_order.end());

    std::vector<FamilyOutcome> outcomes(cfg.families.size());
    std::vector<std::exception_ptr> failures(cfg.families.size());
    std::atomic<size_t> next{0};

    auto run_family = [&](size_t fi) {
        const auto& fam = cfg.families[fi];
        auto& oc = outcomes[fi];
        const std::string fdir = cfg.out + "/" + fam.name;

        log_info("family " + fam.name + ": encoding " + fam.positives);
        oc.encoded = stage("encode", fam.name,
                           [&] { return encode_dir(fam.positives, cfg.format, cfg.zero_run); });

        Rng rng(cfg.seed ^ fnv1a(fam.name));
        std::vector<size_t> order(oc.encoded.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(order);
        const size_t n_train =
            std::min(order.size(), size_t(std::llround(cfg.split * double(order.size()))));
        if (n_train == 0) throw error("split (" + fam.name + "): no training samples left");
        const auto train_pos = sorted_by_id(oc.encoded, {order.begin(), order.begin() + n_train});
        oc.test_pos = sorted_by_id(oc.encoded, {order.begin() + n_train, order.end()});

        write_encoded(fdir + "/train/fasta", oc.encoded, train_pos);
        if (!oc.test_pos.empty()) write_encoded(fdir + "/test/fasta", oc.encoded, oc.test_pos);

        if (neg_train.size() < train_pos.size()) {
            throw error("split (" + fam.name + "): negative pool has " +
                        std::to_string(neg_train.size()) + " training samples, need " +
                        std::to_string(train_pos.size()));
        }
        auto neg_pick = neg_train;
        rng.shuffle(neg_pick);
        neg_pick.resize(train_pos.size());
        neg_pick = sorted_by_id(negs, std::move(neg_pick));
        write_encoded(fdir + "/train/neg", negs, neg_pick);

        std::vector<NucleotideSequence> train_seqs;
        for (size_t i : train_pos) train_seqs.push_back(oc.encoded[i].seq);

        log_info("family " + fam.name + ": finding blocks over " +
                 std::to_string(train_seqs.size()) + " training positives");
        const auto blocks = stage("blocks", fam.name, [&] { return find_blocks(train_seqs, cfg.blocks); });
        if (blocks.empty()) throw error("blocks (" + fam.name + "): no blocks found");
        write_maf(blocks, fdir + "/blocks.maf");
        write_gff(blocks, fdir + "/blocks.gff");

        // Work from the reloaded artifact so every later stage sees exactly
        // what the standalone subcommand would read back.
        save_signature(stage("signature", fam.name,
                             [&] { return build_signature(blocks, fam.name, fp); }),
                       fdir + "/signature");
        const auto sig = load_signature(fdir + "/signature");

        std::vector<NucleotideSequence> neg_seqs;
        for (size_t i : neg_pick) neg_seqs.push_back(negs[i].seq);
        log_info("family " + fam.name + ": featurizing " +
                 std::to_string(train_seqs.size() + neg_seqs.size()) + " training samples");
        write_features_csv(stage("featurize", fam.name,
                                 [&] {
                                     return featurize_corpus(train_seqs, neg_seqs, sig,
                                                             cfg.featurize, fp);
                                 }),
                           fdir + "/features.csv");
        const auto features = read_features_csv(fdir + "/features.csv");

        const auto model = stage("train", fam.name, [&] {
            return fit(features, fam.name, fp, feature_order_fingerprint(sig), cfg.train);
        });
        save_model(model, fdir + "/model.json");

        auto& rep = oc.report;
        rep.family = fam.name;
        rep.n_blocks = sig.blocks.size();
        rep.train_pos = train_pos.size();
        rep.train_neg = neg_pick.size();
        rep.test_pos = oc.test_pos.size();
        rep.has_test = !oc.test_pos.empty();

        if (rep.has_test) {
            auto test_neg = neg_test;
            rng.shuffle(test_neg);
            test_neg.resize(std::min(test_neg.size(), oc.test_pos.size()));
            rep.test_neg = test_neg.size();

            size_t correct = 0, total = 0;
            const auto scored = [&](size_t idx, const std::vector<EncodedSample>& from) {
                const auto fv = score_sample(from[idx].seq, sig, cfg.featurize, fp);
                return predict(model, fv).positive;
            };
            for (size_t i : oc.test_pos) {
                correct += scored(i, oc.encoded) ? 1 : 0;
                ++total;
            }
            for (size_t i : test_neg) {
                correct += scored(i, negs) ? 0 : 1;
                ++total;
            }
            rep.accuracy = total ? double(correct) / double(total) : 0.0;
        }

        oc.detector = {model, sig};
    };

    const size_t workers =
        std::min<size_t>(size_t(std::max(cfg.jobs, 1)), cfg.families.size());
    if (workers <= 1) {
        for (size_t fi = 0; fi < cfg.families.size(); ++fi) run_family(fi);
    } else {
        auto body = [&] {
            for (;;) {
                const size_t fi = next.fetch_add(1);
                if (fi >= cfg.families.size()) return;
                try {
                    run_family(fi);
                } catch (...) {
                    failures[fi] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (size_t w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& t : pool) t.join();
        for (const auto& f : failures) {
            if (f) std::rethrow_exception(f);
        }
    }

    PipelineReport report;
    report.has_test = cfg.split < 1.0;

    std::vector<FamilyDetector> detectors;
    for (const auto& oc : outcomes) detectors.push_back(oc.detector);

    for (auto& oc : outcomes) {
        auto& rep = oc.report;
        if (rep.has_test) {
            log_info("family " + rep.family + ": routing " + std::to_string(oc.test_pos.size()) +
                     " held-out positives");
            for (size_t i : oc.test_pos) {
                const auto det = detect(oc.encoded[i].seq, detectors, cfg.featurize);
                rep.routed_total += 1;
                rep.routed_correct += (!det.benign && det.family == rep.family) ? 1 : 0;
            }
        }
        report.families.push_back(rep);
    }
    if (report.has_test) {
        for (size_t i : neg_test) {
            const auto det = detect(negs[i].seq, detectors, cfg.featurize);
            report.benign_total += 1;
            report.benign_correct += det.benign ? 1 : 0;
        }
    }

    write_pipeline_report_csv(cfg.out + "/report.csv", report);
    return report;
}

void write_pipeline_report_csv(const std::string& path, const PipelineReport& report) {
    std::string out =
        "family,blocks,train_pos,train_neg,test_pos,test_neg,accuracy,routed_correct,routed_total\n";
    char buf[128];
    for (const auto& f : report.families) {
        std::snprintf(buf, sizeof(buf), "%s,%zu,%zu,%zu,%zu,%zu,", f.family.c_str(), f.n_blocks,
                      f.train_pos, f.train_neg, f.test_pos, f.test_neg);
        out += buf;
        if (f.has_test) {
            std::snprintf(buf, sizeof(buf), "%.6f,%zu,%zu\n", f.accuracy, f.routed_correct,
                          f.routed_total);
        } else {
            std::snprintf(buf, sizeof(buf), "-,-,-\n");
        }
        out += buf;
    }
    if (report.has_test) {
        std::snprintf(buf, sizeof(buf), "benign,-,-,-,-,%zu,-,%zu,%zu\n", report.benign_total,
                      report.benign_correct, report.benign_total);
    } else {
        std::snprintf(buf, sizeof(buf), "benign,-,-,-,-,-,-,-,-\n");
    }
    out += buf;
    write_text_file(path, out);
}

}  // namespace malign
