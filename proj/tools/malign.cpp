#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

#include "malign/adversary.hpp"
#include "malign/bytes.hpp"
#include "malign/common.hpp"
#include "malign/datagen.hpp"
#include "malign/explain.hpp"
#include "malign/fasta.hpp"
#include "malign/lcb.hpp"
#include "malign/maf.hpp"
#include "malign/model.hpp"
#include "malign/nucleotide.hpp"
#include "malign/pipeline.hpp"
#include "malign/signature.hpp"
#include "malign/toml.hpp"

namespace fs = std::filesystem;
using namespace malign;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitBadInput = 2;

// Missing inputs are a usage problem, not a runtime failure.
void require_dir(const std::string& path) {
    if (!fs::is_directory(path)) {
        std::cerr << "malign: input directory not found: " << path << "\n";
        std::exit(kExitBadInput);
    }
}

void require_file(const std::string& path) {
    if (!fs::is_regular_file(path)) {
        std::cerr << "malign: input file not found: " << path << "\n";
        std::exit(kExitBadInput);
    }
}

std::vector<std::vector<uint8_t>> read_pool_dir(const std::string& dir) {
    require_dir(dir);
    std::vector<std::vector<uint8_t>> pool;
    for (const auto& path : list_files(dir)) pool.push_back(read_binary_file(path));
    return pool;
}

// Per-family detectors from a pipeline output directory: every subdirectory
// holding model.json plus signature/ counts, sorted by name.
std::vector<FamilyDetector> load_detectors(const std::string& dir) {
    require_dir(dir);
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_directory()) continue;
        const auto sub = e.path().string();
        if (fs::is_regular_file(sub + "/model.json") && fs::is_directory(sub + "/signature")) {
            names.push_back(sub);
        }
    }
    std::sort(names.begin(), names.end());
    std::vector<FamilyDetector> detectors;
    for (const auto& sub : names) {
        detectors.push_back({load_model(sub + "/model.json"), load_signature(sub + "/signature")});
    }
    if (detectors.empty()) {
        std::cerr << "malign: no model.json + signature/ pairs under " << dir << "\n";
        std::exit(kExitBadInput);
    }
    return detectors;
}

struct EncodeArgs {
    std::string input, out;
    int zero_run = int(kDefaultZeroRunThreshold);
    std::string format = "bytes";
};

int cmd_encode(const EncodeArgs& args) {
    require_dir(args.input);
    fs::create_directories(args.out);
    const auto files = list_files(args.input);
    if (files.empty()) {
        std::cerr << "malign: no input files in " << args.input << "\n";
        return kExitBadInput;
    }
    for (const auto& path : files) {
        EncodedSample enc;
        if (args.format == "bytes") {
            const TokenStream tokens = parse_hexdump(read_text_file(path), path);
            enc = encode_tokens(file_stem(path), tokens, size_t(args.zero_run));
        } else {
            RawSample raw{file_stem(path), read_binary_file(path), SampleOrigin::binary};
            enc = encode_sample(raw, size_t(args.zero_run));
        }
        const std::string base = args.out + "/" + enc.seq.id;
        write_fasta({enc.seq}, base + ".fasta");
        write_offset_map(enc.seq.offset_map, base + ".offsets");
        log_info(enc.seq.id + ": " + std::to_string(enc.seq.bases.size()) + " bases (dropped " +
                 std::to_string(enc.report.removed_unknown) + " unknown, " +
                 std::to_string(enc.report.removed_zero_runs) + " zero-run bytes)");
    }
    return 0;
}

struct BlocksArgs {
    std::string fasta, out, gff;
    FindBlocksParams params;
};

int cmd_blocks(const BlocksArgs& args) {
    require_dir(args.fasta);
    const auto seqs = read_fasta_dir(args.fasta);
    if (seqs.empty()) {
        std::cerr << "malign: no FASTA records in " << args.fasta << "\n";
        return kExitBadInput;
    }
    const auto blocks = find_blocks(seqs, args.params);
    write_maf(blocks, args.out);
    if (!args.gff.empty()) write_gff(blocks, args.gff);
    log_info(std::to_string(blocks.size()) + " blocks over " + std::to_string(seqs.size()) +
             " sequences");
    return 0;
}

struct SignatureArgs {
    std::string maf, family, out;
    int zero_run = int(kDefaultZeroRunThreshold);
};

int cmd_signature(const SignatureArgs& args) {
    require_file(args.maf);
    const auto blocks = read_maf(args.maf);
    const auto sig = build_signature(blocks, args.family, encoder_fingerprint(size_t(args.zero_run)));
    save_signature(sig, args.out);
    log_info("signature '" + args.family + "': " + std::to_string(sig.blocks.size()) + " blocks");
    return 0;
}

struct FeaturizeArgs {
    std::string signature, pos, neg, out;
    FeaturizeParams params;
};

int cmd_featurize(const FeaturizeArgs& args) {
    require_dir(args.signature);
    require_dir(args.pos);
    require_dir(args.neg);
    const auto sig = load_signature(args.signature);
    const auto features = featurize_corpus(read_fasta_dir(args.pos), read_fasta_dir(args.neg), sig,
                                           args.params, sig.fingerprint);
    write_features_csv(features, args.out);
    log_info(std::to_string(features.rows.size()) + " samples x " +
             std::to_string(2 * features.n_blocks) + " features");
    return 0;
}

struct TrainArgs {
    std::string features, signature, family, out;
    TrainConfig cfg;
};

int cmd_train(const TrainArgs& args) {
    require_file(args.features);
    require_dir(args.signature);
    const auto features = read_features_csv(args.features);
    const auto sig = load_signature(args.signature);
    if (features.n_blocks != int64_t(sig.blocks.size())) {
        throw error("features cover " + std::to_string(features.n_blocks) + " blocks, signature has " +
                    std::to_string(sig.blocks.size()));
    }
    const auto family = args.family.empty() ? sig.family : args.family;
    const auto model =
        fit(features, family, sig.fingerprint, feature_order_fingerprint(sig), args.cfg);
    save_model(model, args.out);
    size_t active = 0;
    for (double w : model.weights) active += (w != 0.0) ? 1 : 0;
    log_info("model '" + family + "': " + std::to_string(active) + "/" +
             std::to_string(model.weights.size()) + " active weights");
    return 0;
}

struct PredictArgs {
    std::string model, signature, input;
};

int cmd_predict(const PredictArgs& args) {
    require_file(args.model);
    require_dir(args.signature);
    require_file(args.input);
    const auto model = load_model(args.model);
    const auto sig = load_signature(args.signature);
    if (model.encoder_fingerprint != sig.fingerprint) {
        throw error("model and signature disagree on encoder fingerprint");
    }
    if (model.feature_order != feature_order_fingerprint(sig)) {
        throw error("model and signature disagree on block layout");
    }
    std::printf("sample_id,probability,verdict\n");
    for (const auto& seq : read_fasta(args.input)) {
        const auto p = predict(model, score_sample(seq, sig, {}, sig.fingerprint));
        std::printf("%s,%.6f,%s\n", p.sample_id.c_str(), p.probability,
                    p.positive ? "positive" : "negative");
    }
    return 0;
}

struct DetectArgs {
    std::string models, input;
};

int cmd_detect(const DetectArgs& args) {
    require_file(args.input);
    const auto detectors = load_detectors(args.models);
    std::printf("sample_id,verdict,probability\n");
    for (const auto& seq : read_fasta(args.input)) {
        const auto det = detect(seq, detectors);
        double p = det.probability;
        if (det.benign) {
            for (const auto& [fam, fp] : det.per_family) p = std::max(p, fp);
        }
        std::printf("%s,%s,%.6f\n", det.sample_id.c_str(),
                    det.benign ? "benign" : det.family.c_str(), p);
    }
    return 0;
}

struct GenArgs {
    std::string out;
    int families = 3;
    DatagenParams params;
};

int cmd_gen(const GenArgs& args) {
    std::vector<RawSample> pool;
    for (int f = 1; f <= args.families; ++f) {
        const std::string name = "fam" + std::to_string(f);
        DatagenParams p = args.params;
        p.seed = args.params.seed + uint64_t(f) * 7919;  // distinct motif streams per family
        const auto fam = generate_family(name, p);
        const std::string dir = args.out + "/" + name;
        fs::create_directories(dir);
        for (const auto& s : fam.positives) write_binary_file(dir + "/" + s.id + ".bin", s.bytes);
        pool.insert(pool.end(), fam.negatives.begin(), fam.negatives.end());
        write_ground_truth_csv(args.out + "/truth_" + name + ".csv", fam.truth);
        log_info(name + ": " + std::to_string(fam.positives.size()) + " samples, " +
                 std::to_string(fam.motifs.size()) + " motifs");
    }
    const std::string benign = args.out + "/benign";
    fs::create_directories(benign);
    for (const auto& s : pool) write_binary_file(benign + "/" + s.id + ".bin", s.bytes);
    log_info("benign pool: " + std::to_string(pool.size()) + " samples");
    return 0;
}

struct MutateArgs {
    std::string input, out, kind, donor_pool;
    MutationSpec spec;
};

int cmd_mutate(const MutateArgs& args) {
    require_file(args.input);
    MutationSpec spec = args.spec;
    spec.kind = mutation_kind_from_string(args.kind);
    std::vector<std::vector<uint8_t>> pool;
    if (!args.donor_pool.empty()) pool = read_pool_dir(args.donor_pool);
    const auto mutated = mutate(read_binary_file(args.input), spec, pool);
    write_binary_file(args.out, mutated);
    log_info(args.input + " -> " + args.out + " (" + to_string(spec.kind) + ", " +
             std::to_string(mutated.size()) + " bytes)");
    return 0;
}

struct EvalArgs {
    std::string models, corpus, specs, report, donor_pool;
    int zero_run = int(kDefaultZeroRunThreshold);
};

int cmd_eval_robustness(const EvalArgs& args) {
    require_dir(args.corpus);
    require_file(args.specs);
    const auto detectors = load_detectors(args.models);

    std::vector<AdvSample> samples;
    std::vector<std::string> fam_dirs;
    for (const auto& e : fs::directory_iterator(args.corpus)) {
        if (e.is_directory()) fam_dirs.push_back(e.path().string());
    }
    std::sort(fam_dirs.begin(), fam_dirs.end());
    for (const auto& dir : fam_dirs) {
        const auto family = file_stem(dir);
        for (const auto& path : list_files(dir)) {
            samples.push_back({file_stem(path), read_binary_file(path), family});
        }
    }
    if (samples.empty()) {
        std::cerr << "malign: no <family>/<sample> files under " << args.corpus << "\n";
        return kExitBadInput;
    }

    std::vector<MutationSpec> specs;
    const auto doc = read_toml_file(args.specs);
    const auto it = doc.table_arrays.find("spec");
    if (it == doc.table_arrays.end() || it->second.empty()) {
        throw error(args.specs + ": no [[spec]] entries");
    }
    for (const auto& t : it->second) {
        MutationSpec s;
        s.kind = mutation_kind_from_string(t.get_string("kind"));
        s.magnitude = t.get_double("magnitude", s.magnitude);
        s.seed = uint64_t(t.get_int("seed", int64_t(s.seed)));
        specs.push_back(s);
    }

    std::vector<std::vector<uint8_t>> pool;
    if (!args.donor_pool.empty()) pool = read_pool_dir(args.donor_pool);

    const auto report =
        evaluate_robustness(detectors, samples, specs, pool, size_t(args.zero_run));
    write_robustness_csv(report, args.report);
    for (const auto& row : report.rows) {
        log_info(to_string(row.spec.kind) + " @ " + std::to_string(row.spec.magnitude) + ": " +
                 std::to_string(row.evaded) + "/" + std::to_string(row.total) + " evaded");
    }
    return 0;
}

struct BacktrackArgs {
    std::string model, signature, maf, out, offsets;
    int top = 10;
};

int cmd_backtrack(const BacktrackArgs& args) {
    require_file(args.model);
    require_dir(args.signature);
    require_file(args.maf);
    const auto model = load_model(args.model);
    const auto sig = load_signature(args.signature);
    const auto blocks = read_maf(args.maf);
    const auto ranked = top_blocks(model, sig, size_t(args.top));

    std::map<std::string, BaseOffsetMap> maps;
    if (!args.offsets.empty()) {
        require_dir(args.offsets);
        for (const auto& b : blocks) {
            for (const auto& r : b.rows) {
                const auto path = args.offsets + "/" + r.seq_id + ".offsets";
                if (!maps.count(r.seq_id) && fs::is_regular_file(path)) {
                    maps[r.seq_id] = read_offset_map(path);
                }
            }
        }
    }

    std::vector<LocatedRow> rows;
    for (const auto& rb : ranked) {
        const auto located = locate(rb.block_id, blocks, maps);
        rows.insert(rows.end(), located.begin(), located.end());
    }
    write_trace_csv(args.out, ranked, rows);
    log_info(std::to_string(ranked.size()) + " blocks, " + std::to_string(rows.size()) +
             " located rows -> " + args.out);
    return 0;
}

struct RunArgs {
    std::string config;
    int jobs = 0;
};

int cmd_run(const RunArgs& args) {
    require_file(args.config);
    auto cfg = load_pipeline_config(args.config);
    if (args.jobs > 0) cfg.jobs = args.jobs;
    const auto report = run_pipeline(cfg);
    for (const auto& f : report.families) {
        if (f.has_test) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%s: accuracy %.4f, routed %zu/%zu", f.family.c_str(),
                          f.accuracy, f.routed_correct, f.routed_total);
            log_info(buf);
        } else {
            log_info(f.family + ": trained on " + std::to_string(f.train_pos) +
                     " positives (no held-out split)");
        }
    }
    if (report.has_test) {
        log_info("benign hold-out: " + std::to_string(report.benign_correct) + "/" +
                 std::to_string(report.benign_total) + " kept benign");
    }
    log_info("report: " + cfg.out + "/report.csv");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"malign: sequence-alignment malware family signatures"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    EncodeArgs encode_args;
    auto* encode = app.add_subcommand("encode", "encode binaries as nucleotide FASTA");
    encode->add_option("--input", encode_args.input, "directory of input samples")->required();
    encode->add_option("--out", encode_args.out, "output FASTA directory")->required();
    encode->add_option("--zero-run", encode_args.zero_run, "zero-run removal threshold (bytes)")
        ->check(CLI::PositiveNumber);
    encode->add_option("--format", encode_args.format, "input format")
        ->check(CLI::IsMember({"bytes", "bin"}));

    BlocksArgs blocks_args;
    auto* blocks = app.add_subcommand("blocks", "find shared blocks across a FASTA corpus");
    blocks->add_option("--fasta", blocks_args.fasta, "directory of encoded FASTA files")->required();
    blocks->add_option("--out", blocks_args.out, "output MAF path")->required();
    blocks->add_option("--gff", blocks_args.gff, "optional GFF3 path");
    blocks->add_option("--k", blocks_args.params.k, "seed k-mer length")->check(CLI::PositiveNumber);
    blocks->add_option("--min-len", blocks_args.params.min_block_len, "minimum block length (bases)")
        ->check(CLI::PositiveNumber);
    blocks->add_option("--min-support", blocks_args.params.min_support, "minimum sequences per block")
        ->check(CLI::PositiveNumber);
    blocks->add_option("--band", blocks_args.params.band, "extension band half-width")
        ->check(CLI::PositiveNumber);

    SignatureArgs sig_args;
    auto* sig = app.add_subcommand("signature", "build a consensus signature from a MAF");
    sig->add_option("--maf", sig_args.maf, "block alignment MAF")->required();
    sig->add_option("--family", sig_args.family, "family name")->required();
    sig->add_option("--out", sig_args.out, "output signature directory")->required();
    sig->add_option("--zero-run", sig_args.zero_run, "encoder zero-run threshold to stamp")
        ->check(CLI::PositiveNumber);

    FeaturizeArgs feat_args;
    auto* feat = app.add_subcommand("featurize", "score samples against a signature");
    feat->add_option("--signature", feat_args.signature, "signature directory")->required();
    feat->add_option("--pos", feat_args.pos, "FASTA directory of family samples")->required();
    feat->add_option("--neg", feat_args.neg, "FASTA directory of negatives")->required();
    feat->add_option("--out", feat_args.out, "output features CSV")->required();
    feat->add_option("--min-score", feat_args.params.min_score, "minimum alignment score counted");

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "fit a family classifier on features");
    train->add_option("--features", train_args.features, "features CSV")->required();
    train->add_option("--signature", train_args.signature, "signature directory")->required();
    train->add_option("--out", train_args.out, "output model JSON")->required();
    train->add_option("--family", train_args.family, "family name (default: signature's)");
    train->add_option("--c", train_args.cfg.c, "inverse regularization strength")
        ->check(CLI::PositiveNumber);
    train->add_option("--l1-ratio", train_args.cfg.l1_ratio, "L1 share of the penalty")
        ->check(CLI::Range(0.0, 1.0));
    train->add_option("--threshold", train_args.cfg.threshold, "positive decision threshold");

    PredictArgs pred_args;
    auto* pred = app.add_subcommand("predict", "score FASTA records with one model");
    pred->add_option("--model", pred_args.model, "model JSON")->required();
    pred->add_option("--signature", pred_args.signature, "signature directory")->required();
    pred->add_option("--input", pred_args.input, "FASTA file to score")->required();

    DetectArgs det_args;
    auto* det = app.add_subcommand("detect", "route FASTA records across all family models");
    det->add_option("--models", det_args.models, "directory of per-family model dirs")->required();
    det->add_option("--input", det_args.input, "FASTA file to classify")->required();

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "generate synthetic families with planted blocks");
    gen->add_option("--seed", gen_args.params.seed, "generator seed")->required();
    gen->add_option("--out", gen_args.out, "output corpus directory")->required();
    gen->add_option("--families", gen_args.families, "number of families")
        ->check(CLI::PositiveNumber);
    gen->add_option("--samples", gen_args.params.n_samples, "samples per family")
        ->check(CLI::PositiveNumber);
    gen->add_option("--blocks", gen_args.params.n_blocks, "motifs per family")
        ->check(CLI::PositiveNumber);
    gen->add_option("--block-len", gen_args.params.block_len, "motif length (bytes)")
        ->check(CLI::PositiveNumber);
    gen->add_option("--mutation", gen_args.params.mutation_rate, "per-byte mutation rate")
        ->check(CLI::Range(0.0, 0.1));
    gen->add_option("--filler", gen_args.params.filler_len, "filler bytes per sample")
        ->check(CLI::PositiveNumber);
    gen->add_flag("!--no-shuffle", gen_args.params.shuffle, "keep motif order fixed");

    MutateArgs mut_args;
    auto* mut = app.add_subcommand("mutate", "apply one adversarial mutation to a binary");
    mut->add_option("--input", mut_args.input, "input binary")->required();
    mut->add_option("--kind", mut_args.kind, "mutation kind")
        ->required()
        ->check(CLI::IsMember(
            {"pad_append", "intersperse", "shuffle_blocks", "substitute", "cross_family_inject"}));
    mut->add_option("--magnitude", mut_args.spec.magnitude, "mutation magnitude in (0,1]");
    mut->add_option("--seed", mut_args.spec.seed, "mutation seed");
    mut->add_option("--out", mut_args.out, "output binary")->required();
    mut->add_option("--donor-pool", mut_args.donor_pool, "directory of donor binaries");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval-robustness", "measure evasion under mutation specs");
    eval->add_option("--models", eval_args.models, "directory of per-family model dirs")->required();
    eval->add_option("--corpus", eval_args.corpus, "directory of <family>/<sample> binaries")
        ->required();
    eval->add_option("--specs", eval_args.specs, "TOML file of [[spec]] entries")->required();
    eval->add_option("--report", eval_args.report, "output CSV path")->required();
    eval->add_option("--donor-pool", eval_args.donor_pool, "directory of donor binaries");
    eval->add_option("--zero-run", eval_args.zero_run, "encoder zero-run threshold")
        ->check(CLI::PositiveNumber);

    BacktrackArgs back_args;
    auto* back = app.add_subcommand("backtrack", "trace influential blocks to byte offsets");
    back->add_option("--model", back_args.model, "model JSON")->required();
    back->add_option("--signature", back_args.signature, "signature directory")->required();
    back->add_option("--maf", back_args.maf, "block alignment MAF")->required();
    back->add_option("--top", back_args.top, "blocks to trace")->check(CLI::PositiveNumber);
    back->add_option("--out", back_args.out, "output trace CSV")->required();
    back->add_option("--offsets", back_args.offsets, "directory of .offsets sidecars");

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "run the full pipeline from a config");
    run->add_option("--config", run_args.config, "TOML config path")->required();
    run->add_option("--jobs", run_args.jobs, "parallel family workers (overrides config)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (encode->parsed()) return cmd_encode(encode_args);
        if (blocks->parsed()) return cmd_blocks(blocks_args);
        if (sig->parsed()) return cmd_signature(sig_args);
        if (feat->parsed()) return cmd_featurize(feat_args);
        if (train->parsed()) return cmd_train(train_args);
        if (pred->parsed()) return cmd_predict(pred_args);
        if (det->parsed()) return cmd_detect(det_args);
        if (gen->parsed()) return cmd_gen(gen_args);
        if (mut->parsed()) return cmd_mutate(mut_args);
        if (eval->parsed()) return cmd_eval_robustness(eval_args);
        if (back->parsed()) return cmd_backtrack(back_args);
        if (run->parsed()) return cmd_run(run_args);
    } catch (const missing_input_error& e) {
        std::cerr << "malign: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "malign: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
