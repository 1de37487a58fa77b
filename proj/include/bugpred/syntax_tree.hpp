#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace bugpred {

// Code appended to a flattened sequence each time the traversal steps back
// out of a node. Non-positive, so it can never collide with a kind code.
inline constexpr int kScopeExit = -2;

struct TreeNode {
    std::string kind;
    std::string label;  // identifier or literal text; kept for debugging, never emitted
    std::vector<TreeNode> children;
};

struct SyntaxTree {
    TreeNode root;
    std::size_t node_count() const;
};

// Fixed bijective mapping from node-kind names to positive codes. The
// numbering below is part of the corpus file contract: sequences written by
// one build must decode identically under any other.
//
//   1 ClassDeclaration       8 TypeRef            15 QualifiedName
//   2 MethodDeclaration      9 Modifier           16 Name
//   3 InterfaceDeclaration  10 Block              17 StringLiteral
//   4 EnumDeclaration       11 IfStatement        18 IntegerLiteral
//   5 EnumConstant          12 ExpressionStatement 19 BooleanLiteral
//   6 FieldDeclaration      13 Assignment          20 unknown
//   7 Parameter             14 MethodCall
class KindTable {
public:
    static const KindTable& builtin();

    // Unknown names map to the reserved "unknown" code.
    int code(const std::string& kind_name) const;
    bool has(const std::string& kind_name) const;
    int unknown_code() const { return unknown_code_; }
    static constexpr int scope_exit() { return kScopeExit; }

    // Throws std::out_of_range for codes not in the table.
    const std::string& name(int code) const;

    const std::vector<std::pair<std::string, int>>& entries() const { return entries_; }

private:
    KindTable();
    std::vector<std::pair<std::string, int>> entries_;  // sorted by code
    int unknown_code_ = 0;
};

struct TokenSequence {
    std::string doc_id;
    std::vector<int> tokens;  // positive kind codes and kScopeExit markers

    bool operator==(const TokenSequence&) const = default;
};

// Pre-order depth-first emission: a node's kind code on entry, kScopeExit
// after its last descendant. Leaves and the root both get a marker, so the
// output length is exactly 2 * node_count.
TokenSequence flatten(const SyntaxTree& tree, const KindTable& table, std::string doc_id);

// True iff every token is a positive code or kScopeExit, every prefix has
// at most as many markers as positive tokens, and the full sequence has
// exactly as many markers as positive tokens.
bool validate_sequence(const TokenSequence& seq);

// Tree of kind codes only, as recovered from a flattened sequence.
struct CodeTree {
    int code = 0;
    std::vector<CodeTree> children;

    bool operator==(const CodeTree&) const = default;
};

// Inverse of flatten on the code level. Throws std::invalid_argument when
// the sequence is not a valid single-root flattening.
CodeTree reconstruct(const TokenSequence& seq);

// Re-flattens a code tree; reconstruct followed by flatten_codes reproduces
// a valid input sequence exactly.
std::vector<int> flatten_codes(const CodeTree& tree);

}  // namespace bugpred
