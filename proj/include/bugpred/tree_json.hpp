#pragma once

#include <string>
#include <string_view>

#include "bugpred/syntax_tree.hpp"

namespace bugpred {

// Tree interchange format: one JSON document per tree. Each node is an
// object with "kind" (string), optional "children" (array of nodes) and
// optional "label" (string, carried through but never flattened). Kind
// names missing from the built-in table become the "unknown" kind; the
// original name is preserved in the label.
SyntaxTree parse_tree_text(std::string_view text);

SyntaxTree parse_tree_file(const std::string& path);

}  // namespace bugpred
