#include <doctest.h>

#include "bugpred/java_parser.hpp"
#include "bugpred/syntax_tree.hpp"

using namespace bugpred;

namespace {

std::vector<int> flatten_source_single(const std::string& source) {
    auto trees = parse_java_subset(source);
    REQUIRE(trees.size() == 1);
    return flatten(trees[0], KindTable::builtin(), "d").tokens;
}

}  // namespace

TEST_CASE("minimal declarations") {
    CHECK(flatten_source_single("class A {}") == std::vector<int>{1, -2});
    CHECK(flatten_source_single("interface I {}") == std::vector<int>{3, -2});
    CHECK(flatten_source_single("enum E { X, Y }") == std::vector<int>{4, 5, -2, 5, -2, -2});
}

TEST_CASE("nested classes stay inside the enclosing tree") {
    auto trees = parse_java_subset("class A { class B {} }");
    REQUIRE(trees.size() == 1);
    CHECK(trees[0].root.kind == "ClassDeclaration");
    REQUIRE(trees[0].root.children.size() == 1);
    CHECK(trees[0].root.children[0].kind == "ClassDeclaration");
    CHECK(trees[0].root.children[0].label == "B");
}

TEST_CASE("one tree per top-level type") {
    auto trees = parse_java_subset("class A {} interface B {} enum C { K }");
    REQUIRE(trees.size() == 3);
    CHECK(trees[0].root.label == "A");
    CHECK(trees[1].root.label == "B");
    CHECK(trees[2].root.label == "C");
}

TEST_CASE("flag-guarded logging class flattens to the hand-derived sequence") {
    // 25 nodes under this grammar: class, 1 class modifier, field (1 + 2
    // modifiers + type + initializer), method (1 + 2 modifiers + return
    // type + parameter + parameter type + body), if/block/call chain with
    // the dotted callee nested two deep plus one argument.
    const std::string source = R"(
        public class Logger {
            public static boolean enabled = true;
            public static void log(String message) {
                if (enabled) {
                    Console.out.write(message);
                }
            }
        }
    )";
    const std::vector<int> expected = {
        1, 9, -2, 6, 9, -2, 9, -2, 8, -2, 19, -2, -2, 2, 9, -2, 9, -2, 8, -2,
        7, 8, -2, -2, 10, 11, 16, -2, 10, 12, 14, 15, 15, 16, -2, 16, -2, -2,
        16, -2, -2, 16, -2, -2, -2, -2, -2, -2, -2, -2};

    auto trees = parse_java_subset(source);
    REQUIRE(trees.size() == 1);
    CHECK(trees[0].node_count() == 25);
    TokenSequence seq = flatten(trees[0], KindTable::builtin(), "Logger");
    CHECK(seq.tokens == expected);
    CHECK(validate_sequence(seq));
    CHECK(seq.tokens.size() == 2 * trees[0].node_count());

    // Byte-identical on a rerun.
    auto again = parse_java_subset(source);
    CHECK(flatten(again[0], KindTable::builtin(), "Logger").tokens == expected);
}

TEST_CASE("statement after the if body and statement inside it differ only by markers") {
    auto a = flatten_source_single("class A { void f() { if (c) { a; } b; } }");
    auto b = flatten_source_single("class A { void f() { if (c) { a; b; } } }");
    CHECK(a != b);

    auto strip = [](std::vector<int> tokens) {
        std::erase(tokens, KindTable::scope_exit());
        return tokens;
    };
    CHECK(strip(a) == strip(b));
}

TEST_CASE("expressions") {
    // assignment with a qualified target and literal value
    auto tokens = flatten_source_single("class A { void f() { x = 3; s = \"hi\"; } }");
    // class method typeref block (exprstmt assign name int) (exprstmt assign name string)
    CHECK(tokens == std::vector<int>{1, 2, 8, -2, 10, 12, 13, 16, -2, 18, -2, -2, -2,
                                     12, 13, 16, -2, 17, -2, -2, -2, -2, -2, -2});
}

TEST_CASE("interface methods may omit the body") {
    auto tokens = flatten_source_single("interface I { void f(); int g(); }");
    CHECK(tokens == std::vector<int>{3, 2, 8, -2, -2, 2, 8, -2, -2, -2});
}

TEST_CASE("comments are skipped") {
    auto tokens = flatten_source_single("// header\nclass A { /* body */ }");
    CHECK(tokens == std::vector<int>{1, -2});
}

TEST_CASE("errors name the offending token and position") {
    CHECK_THROWS_AS(parse_java_subset("class"), ParseError);
    CHECK_THROWS_AS(parse_java_subset("class A { int x = ; }"), ParseError);
    try {
        parse_java_subset("class A { 3 }");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("'3'") != std::string::npos);
    }
    try {
        parse_java_subset("class A {\n  int x @ 3;\n}");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        CHECK(std::string(e.what()).find("@") != std::string::npos);
    }
}
