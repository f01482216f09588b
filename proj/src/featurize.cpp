#include "malign/featurize.hpp"

#include <cstdio>
#include <sstream>

#include "malign/common.hpp"

namespace malign {

namespace {

int base_index(char c) {
    switch (c) {
        case 'A': return 0;
        case 'C': return 1;
        case 'G': return 2;
        case 'T': return 3;
        default: return -1;
    }
}

// Conservation sum of one alignment against a consensus block. j tracks the
// consensus position; sample bases opposite consensus gaps contribute 0 and
// consensus bases opposite sample gaps are skipped.
double gamma_sum(const PairwiseAlignment& al, const ConsensusBlock& cb) {
    double sum = 0.0;
    int64_t j = al.b.begin;
    for (size_t c = 0; c < al.b_aligned.size(); ++c) {
        const char bc = al.b_aligned[c];
        if (bc == '-') continue;
        const char ac = al.a_aligned[c];
        if (ac != '-') {
            const int v = base_index(ac);
            if (v >= 0) sum += cb.gamma[static_cast<size_t>(j)][v];
        }
        ++j;
    }
    return sum;
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

double aligned_sequence_score(double gamma_sum, int64_t n_rows) {
    return gamma_sum * static_cast<double>(n_rows);
}

FeatureVector score_sample(const NucleotideSequence& sample, const Signature& sig,
                           const FeaturizeParams& params, const std::string& expected_fingerprint) {
    if (!expected_fingerprint.empty() && expected_fingerprint != sig.fingerprint) {
        throw error("encoder fingerprint mismatch: sample uses '" + expected_fingerprint +
                    "', signature '" + sig.family + "' uses '" + sig.fingerprint + "'");
    }
    FeatureVector fv;
    fv.sample_id = sample.id;
    fv.values.reserve(2 * sig.blocks.size());
    for (const auto& cb : sig.blocks) {
        const auto aligns =
            seeded_local_align(sample.bases, cb.bases, params.scoring, params.k, params.min_score,
                               params.band, params.cell_budget);
        double alpha = 0.0;
        for (const auto& al : aligns) {
            alpha += aligned_sequence_score(gamma_sum(al, cb), cb.n_rows);
        }
        fv.values.push_back(alpha);
        fv.values.push_back(static_cast<double>(aligns.size()));
    }
    return fv;
}

FeatureMatrix featurize_corpus(const std::vector<NucleotideSequence>& pos,
                               const std::vector<NucleotideSequence>& neg, const Signature& sig,
                               const FeaturizeParams& params,
                               const std::string& expected_fingerprint) {
    FeatureMatrix m;
    m.n_blocks = static_cast<int64_t>(sig.blocks.size());
    m.sample_ids.reserve(pos.size() + neg.size());
    m.rows.reserve(pos.size() + neg.size());
    for (const auto* group : {&pos, &neg}) {
        const int label = (group == &pos) ? 1 : 0;
        for (const auto& s : *group) {
            auto fv = score_sample(s, sig, params, expected_fingerprint);
            m.sample_ids.push_back(std::move(fv.sample_id));
            m.labels.push_back(label);
            m.rows.push_back(std::move(fv.values));
        }
    }
    return m;
}

void write_features_csv(const FeatureMatrix& m, const std::string& path) {
    std::string out = "sample_id,label";
    for (int64_t b = 1; b <= m.n_blocks; ++b) {
        out += ",a" + std::to_string(b) + ",b" + std::to_string(b);
    }
    out += '\n';
    for (size_t i = 0; i < m.rows.size(); ++i) {
        if (m.rows[i].size() != static_cast<size_t>(2 * m.n_blocks)) {
            throw error("write_features_csv: row " + std::to_string(i) + " has " +
                        std::to_string(m.rows[i].size()) + " values, expected " +
                        std::to_string(2 * m.n_blocks));
        }
        out += m.sample_ids[i];
        out += ',';
        out += std::to_string(m.labels[i]);
        for (const double v : m.rows[i]) {
            out += ',';
            out += format_value(v);
        }
        out += '\n';
    }
    write_text_file(path, out);
}

FeatureMatrix read_features_csv(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    int64_t line_no = 0;

    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        size_t start = 0;
        while (true) {
            const size_t comma = s.find(',', start);
            out.push_back(s.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        return out;
    };

    if (!std::getline(in, line)) throw parse_error("empty file", path, 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto head = split(line);
    if (head.size() < 2 || head[0] != "sample_id" || head[1] != "label" || head.size() % 2 != 0) {
        throw parse_error("bad header", path, line_no);
    }
    FeatureMatrix m;
    m.n_blocks = static_cast<int64_t>((head.size() - 2) / 2);
    for (int64_t b = 0; b < m.n_blocks; ++b) {
        const std::string n = std::to_string(b + 1);
        if (head[2 + 2 * b] != "a" + n || head[3 + 2 * b] != "b" + n) {
            throw parse_error("bad header column '" + head[2 + 2 * b] + "'", path, line_no);
        }
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != head.size()) {
            throw parse_error("expected " + std::to_string(head.size()) + " cells, got " +
                              std::to_string(cells.size()),
                              path, line_no);
        }
        if (cells[0].empty()) throw parse_error("empty sample id", path, line_no);
        if (cells[1] != "0" && cells[1] != "1") {
            throw parse_error("label must be 0 or 1", path, line_no);
        }
        std::vector<double> row;
        row.reserve(cells.size() - 2);
        for (size_t c = 2; c < cells.size(); ++c) {
            try {
                size_t used = 0;
                row.push_back(std::stod(cells[c], &used));
                if (used != cells[c].size()) throw std::invalid_argument(cells[c]);
            } catch (const std::exception&) {
                throw parse_error("bad number '" + cells[c] + "'", path, line_no);
            }
        }
        m.sample_ids.push_back(cells[0]);
        m.labels.push_back(cells[1] == "1" ? 1 : 0);
        m.rows.push_back(std::move(row));
    }
    return m;
}

}  // namespace malign
