#include "malign/maf.hpp"

#include <fstream>
#include <sstream>

#include "malign/common.hpp"

namespace malign {
namespace {

int64_t gapless_length(const std::string& aligned) {
    int64_t n = 0;
    for (char c : aligned)
        if (c != '-') ++n;
    return n;
}

void check_block(const AlignmentBlock& b, const std::string& where) {
    if (b.rows.empty()) throw error(where + ": block without rows");
    const size_t width = b.rows.front().aligned.size();
    for (const auto& r : b.rows) {
        if (r.aligned.size() != width) throw error(where + ": ragged block rows");
        if (r.strand != '+') throw error(where + ": unsupported strand");
        if (r.start < 0 || r.span() <= 0 || r.start + r.span() > r.src_size)
            throw error(where + ": row coordinates out of range for " + r.seq_id);
        if (gapless_length(r.aligned) != r.span())
            throw error(where + ": row text disagrees with span for " + r.seq_id);
        for (char c : r.aligned)
            if (c != 'A' && c != 'C' && c != 'G' && c != 'T' && c != '-')
                throw error(where + ": invalid character in row text");
    }
}

}  // namespace

void write_maf(const std::vector<AlignmentBlock>& blocks, std::ostream& out) {
    out << "##maf version=1\n\n";
    for (const auto& b : blocks) {
        check_block(b, "write_maf");
        out << "a score=" << int64_t(b.rows.size()) * int64_t(b.width()) << '\n';
        for (const auto& r : b.rows)
            out << "s " << r.seq_id << ' ' << r.start << ' ' << r.span() << ' ' << r.strand << ' '
                << r.src_size << ' ' << r.aligned << '\n';
        out << '\n';
    }
}

void write_maf(const std::vector<AlignmentBlock>& blocks, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw error("cannot write " + path);
    write_maf(blocks, out);
    if (!out) throw error("short write: " + path);
}

std::vector<AlignmentBlock> read_maf(std::istream& in, const std::string& filename) {
    std::vector<AlignmentBlock> blocks;
    AlignmentBlock cur;
    bool in_block = false;
    std::string line;
    size_t line_no = 0;

    auto flush = [&] {
        if (!in_block) return;
        if (cur.rows.empty()) throw parse_error("alignment block without s lines", filename, line_no);
        check_block(cur, filename);
        cur.block_id = int64_t(blocks.size()) + 1;
        blocks.push_back(std::move(cur));
        cur = {};
        in_block = false;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "a") {
            flush();
            in_block = true;
        } else if (tag == "s") {
            if (!in_block) throw parse_error("s line outside a block", filename, line_no);
            BlockRow r;
            int64_t size = 0;
            if (!(ls >> r.seq_id >> r.start >> size >> r.strand >> r.src_size >> r.aligned))
                throw parse_error("malformed s line", filename, line_no);
            r.end = r.start + size;
            cur.rows.push_back(std::move(r));
        } else {
            throw parse_error("unexpected line tag '" + tag + "'", filename, line_no);
        }
    }
    flush();
    return blocks;
}

std::vector<AlignmentBlock> read_maf(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open " + path);
    return read_maf(in, path);
}

void write_gff(const std::vector<AlignmentBlock>& blocks, std::ostream& out) {
    out << "##gff-version 3\n";
    for (const auto& b : blocks) {
        check_block(b, "write_gff");
        for (const auto& r : b.rows)
            out << r.seq_id << "\tmalign\tlcb\t" << (r.start + 1) << '\t' << r.end << '\t'
                << b.rows.size() << '\t' << r.strand << "\t.\tID=" << b.block_id << '\n';
    }
}

void write_gff(const std::vector<AlignmentBlock>& blocks, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw error("cannot write " + path);
    write_gff(blocks, out);
    if (!out) throw error("short write: " + path);
}

}  // namespace malign
