#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "malign/nucleotide.hpp"

namespace malign {

// ">id" headers, sequence wrapped at 80 columns, LF line endings.
// Duplicate ids on write and non-ACGT characters on read are errors.
void write_fasta(const std::vector<NucleotideSequence>& seqs, std::ostream& out);
void write_fasta(const std::vector<NucleotideSequence>& seqs, const std::string& path);

std::vector<NucleotideSequence> read_fasta(std::istream& in, const std::string& filename = "<fasta>");
std::vector<NucleotideSequence> read_fasta(const std::string& path);

// All records from every *.fasta file in a directory, file order sorted.
std::vector<NucleotideSequence> read_fasta_dir(const std::string& dir);

// Sidecar persistence for cleaning offset maps ("<base_index> <source_byte>"
// per line). Used by the explain path to get back to original coordinates.
void write_offset_map(const BaseOffsetMap& map, const std::string& path);
BaseOffsetMap read_offset_map(const std::string& path);

}  // namespace malign
