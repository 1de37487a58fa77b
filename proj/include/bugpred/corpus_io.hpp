#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bugpred/syntax_tree.hpp"

namespace bugpred {

// Flattened corpus file: one record per document,
//   <doc_id> TAB <space-separated integers> NEWLINE
// sorted by doc_id. Duplicate ids are an error on both ends.
void write_corpus(std::vector<TokenSequence> corpus, std::ostream& out);
void write_corpus_file(std::vector<TokenSequence> corpus, const std::string& path);

std::vector<TokenSequence> read_corpus(std::istream& in);
std::vector<TokenSequence> read_corpus_file(const std::string& path);

}  // namespace bugpred
