#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bugpred/syntax_tree.hpp"

namespace bugpred {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Recursive-descent parser for a small Java subset:
//
//   * class / interface / enum declarations (nested types stay inside the
//     enclosing type's tree; they never become separate documents)
//   * field declarations with optional initializer
//   * method declarations with parameters and a block body (or ';' for
//     abstract/interface methods)
//   * blocks, if/else, expression statements
//   * assignments, method calls, qualified names, identifiers
//   * string / integer / boolean literals, modifiers
//
// Line and block comments are skipped. Anything else raises ParseError
// naming the offending token and its line:column position.
//
// Returns one SyntaxTree per top-level type declaration, in source order.
std::vector<SyntaxTree> parse_java_subset(std::string_view source);

}  // namespace bugpred
