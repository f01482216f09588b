#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "malign/lcb.hpp"

namespace malign {

// One "a score=<rows * width>" line per block, one "s" line per row, blocks
// separated by blank lines. Only '+' strands are produced or accepted.
void write_maf(const std::vector<AlignmentBlock>& blocks, std::ostream& out);
void write_maf(const std::vector<AlignmentBlock>& blocks, const std::string& path);

// Blocks get ids 1..N in file order, matching what write_maf was given.
std::vector<AlignmentBlock> read_maf(std::istream& in, const std::string& filename = "<maf>");
std::vector<AlignmentBlock> read_maf(const std::string& path);

// GFF3, one feature per block row: source "malign", type "lcb", 1-based
// inclusive coordinates, score = row count, ID = block id.
void write_gff(const std::vector<AlignmentBlock>& blocks, std::ostream& out);
void write_gff(const std::vector<AlignmentBlock>& blocks, const std::string& path);

}  // namespace malign
