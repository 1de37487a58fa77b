#include "bugpred/java_parser.hpp"

#include <cctype>
#include <unordered_set>

namespace bugpred {

namespace {

enum class Tok {
    kIdentifier,
    kKeyword,
    kIntLiteral,
    kStringLiteral,
    kPunct,
    kEnd,
};

struct Token {
    Tok type = Tok::kEnd;
    std::string text;
    int line = 0;
    int col = 0;
};

const std::unordered_set<std::string>& keywords() {
    static const std::unordered_set<std::string> kw = {
        "class", "interface", "enum", "if", "else", "true", "false", "void",
        "public", "private", "protected", "static", "final", "abstract",
    };
    return kw;
}

bool is_modifier(const std::string& s) {
    return s == "public" || s == "private" || s == "protected" || s == "static" ||
           s == "final" || s == "abstract";
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space_and_comments();
            Token t = next_token();
            out.push_back(t);
            if (t.type == Tok::kEnd) break;
        }
        return out;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
                advance();
                advance();
                while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) {
                    if (src_[pos_] == '\n') {
                        ++line_;
                        col_ = 0;
                    }
                    advance();
                }
                if (pos_ + 1 >= src_.size()) fail("unterminated block comment");
                advance();
                advance();
            } else {
                break;
            }
        }
    }

    Token next_token() {
        if (pos_ >= src_.size()) return {Tok::kEnd, "<end of input>", line_, col_};
        Token t;
        t.line = line_;
        t.col = col_;
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
            while (pos_ < src_.size()) {
                char d = src_[pos_];
                if (!std::isalnum(static_cast<unsigned char>(d)) && d != '_' && d != '$') break;
                t.text.push_back(d);
                advance();
            }
            t.type = keywords().count(t.text) ? Tok::kKeyword : Tok::kIdentifier;
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                t.text.push_back(src_[pos_]);
                advance();
            }
            t.type = Tok::kIntLiteral;
            return t;
        }
        if (c == '"') {
            advance();
            while (pos_ < src_.size() && src_[pos_] != '"') {
                if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) {
                    t.text.push_back(src_[pos_]);
                    advance();
                }
                if (src_[pos_] == '\n') fail("unterminated string literal");
                t.text.push_back(src_[pos_]);
                advance();
            }
            if (pos_ >= src_.size()) fail("unterminated string literal");
            advance();
            t.type = Tok::kStringLiteral;
            return t;
        }
        if (std::string_view("{}();,=.").find(c) != std::string_view::npos) {
            t.type = Tok::kPunct;
            t.text = std::string(1, c);
            advance();
            return t;
        }
        fail(std::string("unsupported character '") + c + "'");
        return {};
    }

    void advance() {
        ++pos_;
        ++col_;
    }

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseError("line " + std::to_string(line_) + ", col " + std::to_string(col_) +
                         ": " + msg);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    std::vector<SyntaxTree> parse_unit() {
        std::vector<SyntaxTree> trees;
        while (!at_end()) trees.push_back(SyntaxTree{parse_type_decl()});
        return trees;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }

    bool at_end() const { return peek().type == Tok::kEnd; }

    const Token& advance() { return toks_[pos_++]; }

    bool check_punct(const char* p) const { return peek().type == Tok::kPunct && peek().text == p; }
    bool check_keyword(const char* k) const {
        return peek().type == Tok::kKeyword && peek().text == k;
    }

    bool match_punct(const char* p) {
        if (!check_punct(p)) return false;
        advance();
        return true;
    }

    const Token& expect_punct(const char* p) {
        if (!check_punct(p)) fail(std::string("expected '") + p + "'");
        return advance();
    }

    const Token& expect_identifier(const char* what) {
        if (peek().type != Tok::kIdentifier) fail(std::string("expected ") + what);
        return advance();
    }

    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = peek();
        throw ParseError("line " + std::to_string(t.line) + ", col " + std::to_string(t.col) +
                         ": unexpected token '" + t.text + "', " + expected);
    }

    std::vector<TreeNode> parse_modifiers() {
        std::vector<TreeNode> mods;
        while (peek().type == Tok::kKeyword && is_modifier(peek().text)) {
            mods.push_back(TreeNode{"Modifier", advance().text, {}});
        }
        return mods;
    }

    bool at_type_keyword() const {
        return check_keyword("class") || check_keyword("interface") || check_keyword("enum");
    }

    TreeNode parse_type_decl() {
        std::vector<TreeNode> mods = parse_modifiers();
        if (!at_type_keyword()) fail("expected 'class', 'interface' or 'enum'");
        std::string kw = advance().text;

        TreeNode node;
        node.kind = kw == "class"       ? "ClassDeclaration"
                    : kw == "interface" ? "InterfaceDeclaration"
                                        : "EnumDeclaration";
        node.label = expect_identifier("type name").text;
        node.children = std::move(mods);

        expect_punct("{");
        if (kw == "enum") {
            parse_enum_constants(node);
            if (match_punct(";")) {
                while (!check_punct("}")) node.children.push_back(parse_member());
            }
        } else {
            while (!check_punct("}")) node.children.push_back(parse_member());
        }
        expect_punct("}");
        return node;
    }

    void parse_enum_constants(TreeNode& node) {
        if (check_punct("}") || check_punct(";")) return;
        while (true) {
            TreeNode c{"EnumConstant", expect_identifier("enum constant name").text, {}};
            node.children.push_back(std::move(c));
            if (!match_punct(",")) break;
        }
    }

    TreeNode parse_member() {
        // Peek past modifiers to distinguish nested types from fields/methods.
        std::size_t save = pos_;
        while (peek().type == Tok::kKeyword && is_modifier(peek().text)) advance();
        bool nested_type = at_type_keyword();
        pos_ = save;

        if (nested_type) return parse_type_decl();
        return parse_field_or_method();
    }

    TreeNode parse_type_ref() {
        std::string text;
        if (check_keyword("void")) {
            text = advance().text;
        } else {
            text = expect_identifier("a type name").text;
            while (check_punct(".")) {
                advance();
                text += '.';
                text += expect_identifier("a name after '.'").text;
            }
        }
        return TreeNode{"TypeRef", text, {}};
    }

    TreeNode parse_field_or_method() {
        std::vector<TreeNode> mods = parse_modifiers();
        TreeNode type = parse_type_ref();
        std::string name = expect_identifier("a member name").text;

        if (check_punct("(")) {
            TreeNode m{"MethodDeclaration", name, std::move(mods)};
            m.children.push_back(std::move(type));
            advance();
            if (!check_punct(")")) {
                while (true) {
                    TreeNode p{"Parameter", "", {}};
                    p.children.push_back(parse_type_ref());
                    p.label = expect_identifier("a parameter name").text;
                    m.children.push_back(std::move(p));
                    if (!match_punct(",")) break;
                }
            }
            expect_punct(")");
            if (match_punct(";")) return m;  // abstract / interface method
            m.children.push_back(parse_block());
            return m;
        }

        TreeNode f{"FieldDeclaration", name, std::move(mods)};
        f.children.push_back(std::move(type));
        if (match_punct("=")) f.children.push_back(parse_expression());
        expect_punct(";");
        return f;
    }

    TreeNode parse_block() {
        expect_punct("{");
        TreeNode b{"Block", "", {}};
        while (!check_punct("}")) b.children.push_back(parse_statement());
        expect_punct("}");
        return b;
    }

    TreeNode parse_statement() {
        if (check_punct("{")) return parse_block();
        if (check_keyword("if")) {
            advance();
            expect_punct("(");
            TreeNode s{"IfStatement", "", {}};
            s.children.push_back(parse_expression());
            expect_punct(")");
            s.children.push_back(parse_statement());
            if (check_keyword("else")) {
                advance();
                s.children.push_back(parse_statement());
            }
            return s;
        }
        TreeNode s{"ExpressionStatement", "", {}};
        s.children.push_back(parse_expression());
        expect_punct(";");
        return s;
    }

    TreeNode parse_expression() {
        TreeNode lhs = parse_primary();
        if (check_punct("=")) {
            advance();
            TreeNode a{"Assignment", "", {}};
            a.children.push_back(std::move(lhs));
            a.children.push_back(parse_expression());  // right-associative
            return a;
        }
        return lhs;
    }

    TreeNode parse_primary() {
        const Token& t = peek();
        if (t.type == Tok::kIntLiteral) return TreeNode{"IntegerLiteral", advance().text, {}};
        if (t.type == Tok::kStringLiteral) return TreeNode{"StringLiteral", advance().text, {}};
        if (check_keyword("true") || check_keyword("false"))
            return TreeNode{"BooleanLiteral", advance().text, {}};
        if (t.type == Tok::kIdentifier) return parse_name_or_call();
        fail("expected an expression");
    }

    // name ('.' name)* ('(' args ')')?  Dotted names nest left to right.
    TreeNode parse_name_or_call() {
        TreeNode name{"Name", advance().text, {}};
        while (check_punct(".")) {
            advance();
            TreeNode q{"QualifiedName", "", {}};
            q.children.push_back(std::move(name));
            q.children.push_back(TreeNode{"Name", expect_identifier("a name after '.'").text, {}});
            name = std::move(q);
        }
        if (check_punct("(")) {
            advance();
            TreeNode call{"MethodCall", "", {}};
            call.children.push_back(std::move(name));
            if (!check_punct(")")) {
                while (true) {
                    call.children.push_back(parse_expression());
                    if (!match_punct(",")) break;
                }
            }
            expect_punct(")");
            return call;
        }
        return name;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<SyntaxTree> parse_java_subset(std::string_view source) {
    Lexer lexer(source);
    Parser parser(lexer.run());
    return parser.parse_unit();
}

}  // namespace bugpred
