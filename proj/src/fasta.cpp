#include "malign/fasta.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "malign/common.hpp"

namespace malign {

static constexpr size_t kWrap = 80;

void write_fasta(const std::vector<NucleotideSequence>& seqs, std::ostream& out) {
    std::unordered_set<std::string> seen;
    for (const auto& s : seqs) {
        if (s.id.empty()) throw error("FASTA record with empty id");
        if (!seen.insert(s.id).second) throw error("duplicate FASTA id: " + s.id);
        out << '>' << s.id << '\n';
        for (size_t i = 0; i < s.bases.size(); i += kWrap) {
            out.write(s.bases.data() + i, static_cast<std::streamsize>(std::min(kWrap, s.bases.size() - i)));
            out << '\n';
        }
    }
}

void write_fasta(const std::vector<NucleotideSequence>& seqs, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw error("cannot write " + path);
    write_fasta(seqs, out);
    if (!out) throw error("short write: " + path);
}

std::vector<NucleotideSequence> read_fasta(std::istream& in, const std::string& filename) {
    std::vector<NucleotideSequence> seqs;
    std::unordered_set<std::string> seen;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '>') {
            std::string id = line.substr(1);
            // id is the first whitespace-delimited word of the header
            size_t sp = id.find_first_of(" \t");
            if (sp != std::string::npos) id.resize(sp);
            if (id.empty()) throw parse_error("empty FASTA id", filename, line_no);
            if (!seen.insert(id).second) throw parse_error("duplicate FASTA id: " + id, filename, line_no);
            seqs.push_back({id, "", {}});
        } else {
            if (seqs.empty()) throw parse_error("sequence data before first header", filename, line_no);
            for (size_t col = 0; col < line.size(); ++col) {
                char c = line[col];
                if (c != 'A' && c != 'C' && c != 'G' && c != 'T')
                    throw parse_error("invalid base '" + std::string(1, c) + "' at column " +
                                          std::to_string(col + 1),
                                      filename, line_no);
            }
            seqs.back().bases += line;
        }
    }
    return seqs;
}

std::vector<NucleotideSequence> read_fasta(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open " + path);
    return read_fasta(in, path);
}

std::vector<NucleotideSequence> read_fasta_dir(const std::string& dir) {
    std::vector<NucleotideSequence> all;
    for (const auto& f : list_files(dir, ".fasta")) {
        auto seqs = read_fasta(f);
        all.insert(all.end(), std::make_move_iterator(seqs.begin()), std::make_move_iterator(seqs.end()));
    }
    return all;
}

void write_offset_map(const BaseOffsetMap& map, const std::string& path) {
    std::ostringstream out;
    for (const auto& [base, source] : map) out << base << ' ' << source << '\n';
    write_text_file(path, out.str());
}

BaseOffsetMap read_offset_map(const std::string& path) {
    std::istringstream in(read_text_file(path));
    BaseOffsetMap map;
    int64_t base, source;
    while (in >> base >> source) map.emplace_back(base, source);
    return map;
}

}  // namespace malign
