#include "bugpred/tree_json.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bugpred {

namespace {

TreeNode node_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::runtime_error("tree node must be an object");
    auto kind_it = j.find("kind");
    if (kind_it == j.end() || !kind_it->is_string())
        throw std::runtime_error("tree node is missing a string \"kind\"");

    TreeNode node;
    node.kind = kind_it->get<std::string>();
    if (auto it = j.find("label"); it != j.end() && it->is_string())
        node.label = it->get<std::string>();
    if (!KindTable::builtin().has(node.kind)) {
        if (node.label.empty()) node.label = node.kind;
        node.kind = "unknown";
    }
    if (auto it = j.find("children"); it != j.end()) {
        if (!it->is_array()) throw std::runtime_error("\"children\" must be an array");
        node.children.reserve(it->size());
        for (const auto& c : *it) node.children.push_back(node_from_json(c));
    }
    return node;
}

}  // namespace

SyntaxTree parse_tree_text(std::string_view text) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw std::runtime_error("empty tree");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // nlohmann reports the byte offset; keep it in the message.
        throw std::runtime_error(std::string("tree parse error: ") + e.what());
    }
    return SyntaxTree{node_from_json(j)};
}

SyntaxTree parse_tree_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open tree file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_tree_text(buf.str());
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

}  // namespace bugpred
