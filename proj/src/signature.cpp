#include "malign/signature.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "malign/common.hpp"
#include "malign/kernels.hpp"

namespace malign {

namespace {

constexpr char kBases[4] = {'A', 'C', 'G', 'T'};

// Widened per-column counts for the 5 planes (A,C,G,T,'-').
struct ColumnCounts {
    std::vector<int64_t> counts;  // 5 * width
    int64_t width = 0;

    int64_t at(int plane, int64_t col) const { return counts[plane * width + col]; }
};

ColumnCounts count_columns(const AlignmentBlock& block) {
    const int64_t w = block.width();
    ColumnCounts out;
    out.width = w;
    out.counts.assign(5 * w, 0);
    if (w == 0) return out;

    const auto& k = kern::active();
    std::vector<uint8_t> planes(5 * w);
    size_t batched = 0;
    auto widen = [&] {
        for (size_t i = 0; i < planes.size(); ++i) out.counts[i] += planes[i];
        std::fill(planes.begin(), planes.end(), 0);
        batched = 0;
    };
    for (const auto& row : block.rows) {
        k.add_column_counts(row.aligned.data(), static_cast<size_t>(w), planes.data());
        if (++batched == 254) widen();
    }
    if (batched > 0) widen();
    return out;
}

void write_gamma_line(std::string& out, int64_t block_id, int64_t pos,
                      const std::array<double, 4>& g) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%" PRId64 " %" PRId64 " %.6f %.6f %.6f %.6f\n", block_id, pos,
                  g[0], g[1], g[2], g[3]);
    out += buf;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

int64_t parse_i64(const std::string& s, const std::string& file, int64_t line_no) {
    try {
        size_t used = 0;
        const int64_t v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw parse_error("bad integer '" + s + "'", file, line_no);
    }
}

double parse_f64(const std::string& s, const std::string& file, int64_t line_no) {
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw parse_error("bad number '" + s + "'", file, line_no);
    }
}

}  // namespace

ConsensusBlock build_consensus(const AlignmentBlock& block) {
    if (block.rows.size() < 2) throw error("build_consensus: block needs at least 2 rows");
    const int64_t n = static_cast<int64_t>(block.rows.size());
    const int64_t w = block.width();

    const ColumnCounts cc = count_columns(block);

    ConsensusBlock out;
    out.block_id = block.block_id;
    out.n_rows = n;
    out.bases.reserve(w);
    for (int64_t col = 0; col < w; ++col) {
        const int64_t gaps = cc.at(4, col);
        if (gaps * 2 > n) continue;  // gap-majority column carries no signal
        int best = 0;
        for (int v = 1; v < 4; ++v) {
            if (cc.at(v, col) > cc.at(best, col)) best = v;
        }
        std::array<double, 4> g;
        for (int v = 0; v < 4; ++v) {
            g[v] = static_cast<double>(cc.at(v, col)) / static_cast<double>(n);
        }
        out.bases.push_back(kBases[best]);
        out.gamma.push_back(g);
        out.column_map.push_back(col);
    }
    return out;
}

Signature build_signature(const std::vector<AlignmentBlock>& blocks, const std::string& family,
                          const std::string& fingerprint) {
    Signature sig;
    sig.family = family;
    sig.fingerprint = fingerprint;
    sig.blocks.reserve(blocks.size());
    for (const auto& b : blocks) sig.blocks.push_back(build_consensus(b));
    std::sort(sig.blocks.begin(), sig.blocks.end(),
              [](const ConsensusBlock& x, const ConsensusBlock& y) {
                  return x.block_id < y.block_id;
              });
    return sig;
}

void save_signature(const Signature& sig, const std::string& dir) {
    if (sig.family.empty()) throw error("save_signature: empty family name");
    if (sig.fingerprint.empty()) throw error("save_signature: empty fingerprint");
    std::set<int64_t> ids;
    for (const auto& b : sig.blocks) {
        if (b.bases.size() != b.gamma.size() || b.bases.size() != b.column_map.size()) {
            throw error("save_signature: block " + std::to_string(b.block_id) +
                        " has inconsistent lengths");
        }
        if (!ids.insert(b.block_id).second) {
            throw error("save_signature: duplicate block id " + std::to_string(b.block_id));
        }
    }
    std::filesystem::create_directories(dir);

    std::string fasta;
    for (const auto& b : sig.blocks) {
        fasta += ">block_" + std::to_string(b.block_id) + " n=" + std::to_string(b.n_rows) + "\n";
        for (size_t i = 0; i < b.bases.size(); i += 80) {
            fasta += b.bases.substr(i, 80);
            fasta += '\n';
        }
    }
    write_text_file(dir + "/consensus.fasta", fasta);

    std::string gamma;
    gamma += "# malign signature v1\n";
    gamma += "# family " + sig.family + "\n";
    gamma += "# fingerprint " + sig.fingerprint + "\n";
    for (const auto& b : sig.blocks) {
        gamma += "# colmap " + std::to_string(b.block_id);
        for (const int64_t c : b.column_map) gamma += ' ' + std::to_string(c);
        gamma += '\n';
        for (size_t p = 0; p < b.gamma.size(); ++p) {
            write_gamma_line(gamma, b.block_id, static_cast<int64_t>(p), b.gamma[p]);
        }
    }
    write_text_file(dir + "/consensus.gamma", gamma);
}

Signature load_signature(const std::string& dir) {
    const std::string fasta_path = dir + "/consensus.fasta";
    const std::string gamma_path = dir + "/consensus.gamma";

    // consensus.fasta: headers carry the row count, so parse by hand.
    std::istringstream fin(read_text_file(fasta_path));
    std::map<int64_t, ConsensusBlock> blocks;
    std::vector<int64_t> order;
    ConsensusBlock* cur = nullptr;
    std::string line;
    int64_t line_no = 0;
    while (std::getline(fin, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '>') {
            const auto toks = split_ws(line.substr(1));
            if (toks.size() != 2 || toks[0].rfind("block_", 0) != 0 ||
                toks[1].rfind("n=", 0) != 0) {
                throw parse_error("expected '>block_<id> n=<rows>'", fasta_path, line_no);
            }
            const int64_t id = parse_i64(toks[0].substr(6), fasta_path, line_no);
            const int64_t n = parse_i64(toks[1].substr(2), fasta_path, line_no);
            if (n < 1) throw parse_error("row count must be positive", fasta_path, line_no);
            if (blocks.count(id)) {
                throw parse_error("duplicate block id " + std::to_string(id), fasta_path, line_no);
            }
            cur = &blocks[id];
            cur->block_id = id;
            cur->n_rows = n;
            order.push_back(id);
            continue;
        }
        if (cur == nullptr) throw parse_error("sequence before first header", fasta_path, line_no);
        for (const char c : line) {
            if (c != 'A' && c != 'C' && c != 'G' && c != 'T') {
                throw parse_error(std::string("invalid consensus base '") + c + "'", fasta_path,
                                  line_no);
            }
        }
        cur->bases += line;
    }

    // consensus.gamma: '#' headers then one row per consensus position.
    std::istringstream gin(read_text_file(gamma_path));
    std::string family;
    std::string fingerprint;
    std::map<int64_t, size_t> seen;  // gamma rows consumed per block
    line_no = 0;
    while (std::getline(gin, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto toks = split_ws(line.substr(1));
            if (toks.empty()) continue;
            if (toks[0] == "family" && toks.size() == 2) {
                family = toks[1];
            } else if (toks[0] == "fingerprint" && toks.size() == 2) {
                fingerprint = toks[1];
            } else if (toks[0] == "colmap") {
                if (toks.size() < 2) throw parse_error("colmap without id", gamma_path, line_no);
                const int64_t id = parse_i64(toks[1], gamma_path, line_no);
                const auto it = blocks.find(id);
                if (it == blocks.end()) {
                    throw parse_error("colmap for unknown block " + std::to_string(id), gamma_path,
                                      line_no);
                }
                if (!it->second.column_map.empty()) {
                    throw parse_error("duplicate colmap for block " + std::to_string(id),
                                      gamma_path, line_no);
                }
                int64_t prev = -1;
                for (size_t i = 2; i < toks.size(); ++i) {
                    const int64_t c = parse_i64(toks[i], gamma_path, line_no);
                    if (c <= prev) {
                        throw parse_error("colmap not strictly increasing", gamma_path, line_no);
                    }
                    it->second.column_map.push_back(c);
                    prev = c;
                }
                if (it->second.column_map.size() != it->second.bases.size()) {
                    throw parse_error("colmap length mismatch for block " + std::to_string(id),
                                      gamma_path, line_no);
                }
            }
            continue;
        }
        const auto toks = split_ws(line);
        if (toks.size() != 6) {
            throw parse_error("expected '<block> <pos> <gA> <gC> <gG> <gT>'", gamma_path, line_no);
        }
        const int64_t id = parse_i64(toks[0], gamma_path, line_no);
        const int64_t pos = parse_i64(toks[1], gamma_path, line_no);
        const auto it = blocks.find(id);
        if (it == blocks.end()) {
            throw parse_error("gamma row for unknown block " + std::to_string(id), gamma_path,
                              line_no);
        }
        ConsensusBlock& b = it->second;
        if (pos != static_cast<int64_t>(seen[id])) {
            throw parse_error("gamma rows out of order for block " + std::to_string(id),
                              gamma_path, line_no);
        }
        if (pos >= static_cast<int64_t>(b.bases.size())) {
            throw parse_error("gamma row past consensus end for block " + std::to_string(id),
                              gamma_path, line_no);
        }
        std::array<double, 4> g;
        double total = 0.0;
        for (int v = 0; v < 4; ++v) {
            g[v] = parse_f64(toks[2 + v], gamma_path, line_no);
            if (g[v] < 0.0 || g[v] > 1.0) {
                throw parse_error("gamma outside [0,1]", gamma_path, line_no);
            }
            total += g[v];
        }
        // four values each rounded to 6 decimals can overshoot by 4 * 5e-7
        if (total > 1.0 + 2.5e-6) throw parse_error("gamma fractions exceed 1", gamma_path, line_no);
        b.gamma.push_back(g);
        ++seen[id];
    }
    if (family.empty()) throw parse_error("missing family header", gamma_path, 0);
    if (fingerprint.empty()) throw parse_error("missing fingerprint header", gamma_path, 0);

    Signature sig;
    sig.family = family;
    sig.fingerprint = fingerprint;
    std::sort(order.begin(), order.end());
    for (const int64_t id : order) {
        ConsensusBlock& b = blocks[id];
        if (b.gamma.size() != b.bases.size()) {
            throw parse_error("gamma rows missing for block " + std::to_string(id), gamma_path, 0);
        }
        if (b.column_map.size() != b.bases.size()) {
            throw parse_error("colmap missing for block " + std::to_string(id), gamma_path, 0);
        }
        sig.blocks.push_back(std::move(b));
    }
    return sig;
}

}  // namespace malign
