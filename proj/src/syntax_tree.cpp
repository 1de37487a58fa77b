#include "bugpred/syntax_tree.hpp"

#include <stdexcept>
#include <unordered_map>

namespace bugpred {

namespace {

const std::unordered_map<std::string, int>& name_to_code_map() {
    static const std::unordered_map<std::string, int> map = [] {
        std::unordered_map<std::string, int> m;
        for (const auto& [name, code] : KindTable::builtin().entries()) m.emplace(name, code);
        return m;
    }();
    return map;
}

}  // namespace

KindTable::KindTable() {
    entries_ = {
        {"ClassDeclaration", 1},
        {"MethodDeclaration", 2},
        {"InterfaceDeclaration", 3},
        {"EnumDeclaration", 4},
        {"EnumConstant", 5},
        {"FieldDeclaration", 6},
        {"Parameter", 7},
        {"TypeRef", 8},
        {"Modifier", 9},
        {"Block", 10},
        {"IfStatement", 11},
        {"ExpressionStatement", 12},
        {"Assignment", 13},
        {"MethodCall", 14},
        {"QualifiedName", 15},
        {"Name", 16},
        {"StringLiteral", 17},
        {"IntegerLiteral", 18},
        {"BooleanLiteral", 19},
        {"unknown", 20},
    };
    unknown_code_ = 20;
}

const KindTable& KindTable::builtin() {
    static const KindTable table;
    return table;
}

int KindTable::code(const std::string& kind_name) const {
    auto it = name_to_code_map().find(kind_name);
    return it == name_to_code_map().end() ? unknown_code_ : it->second;
}

bool KindTable::has(const std::string& kind_name) const {
    return name_to_code_map().count(kind_name) != 0;
}

const std::string& KindTable::name(int code) const {
    for (const auto& e : entries_)
        if (e.second == code) return e.first;
    throw std::out_of_range("no kind with code " + std::to_string(code));
}

std::size_t SyntaxTree::node_count() const {
    std::size_t n = 0;
    auto walk = [&](auto&& self, const TreeNode& node) -> void {
        ++n;
        for (const TreeNode& c : node.children) self(self, c);
    };
    walk(walk, root);
    return n;
}

TokenSequence flatten(const SyntaxTree& tree, const KindTable& table, std::string doc_id) {
    TokenSequence seq;
    seq.doc_id = std::move(doc_id);
    auto walk = [&](auto&& self, const TreeNode& node) -> void {
        seq.tokens.push_back(table.code(node.kind));
        for (const TreeNode& c : node.children) self(self, c);
        seq.tokens.push_back(kScopeExit);
    };
    walk(walk, tree.root);
    return seq;
}

bool validate_sequence(const TokenSequence& seq) {
    long positives = 0;
    long markers = 0;
    for (int t : seq.tokens) {
        if (t >= 1) {
            ++positives;
        } else if (t == kScopeExit) {
            ++markers;
            if (markers > positives) return false;
        } else {
            return false;
        }
    }
    return markers == positives;
}

CodeTree reconstruct(const TokenSequence& seq) {
    if (seq.tokens.empty()) throw std::invalid_argument("empty sequence");
    if (!validate_sequence(seq)) throw std::invalid_argument("invalid sequence");

    CodeTree root;
    std::vector<CodeTree*> stack;
    std::size_t i = 0;
    for (int t : seq.tokens) {
        if (t >= 1) {
            if (stack.empty()) {
                if (i != 0) throw std::invalid_argument("sequence has more than one root");
                root.code = t;
                stack.push_back(&root);
            } else {
                stack.back()->children.push_back(CodeTree{t, {}});
                stack.push_back(&stack.back()->children.back());
            }
        } else {
            stack.pop_back();
        }
        ++i;
    }
    return root;
}

std::vector<int> flatten_codes(const CodeTree& tree) {
    std::vector<int> out;
    auto walk = [&](auto&& self, const CodeTree& node) -> void {
        out.push_back(node.code);
        for (const CodeTree& c : node.children) self(self, c);
        out.push_back(kScopeExit);
    };
    walk(walk, tree);
    return out;
}

}  // namespace bugpred
