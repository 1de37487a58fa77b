#include "bugpred/corpus_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace bugpred {

void write_corpus(std::vector<TokenSequence> corpus, std::ostream& out) {
    std::sort(corpus.begin(), corpus.end(),
              [](const TokenSequence& a, const TokenSequence& b) { return a.doc_id < b.doc_id; });
    for (std::size_t i = 1; i < corpus.size(); ++i)
        if (corpus[i].doc_id == corpus[i - 1].doc_id)
            throw std::runtime_error("duplicate document id: " + corpus[i].doc_id);
    for (const TokenSequence& seq : corpus) {
        if (seq.doc_id.find_first_of("\t\n") != std::string::npos)
            throw std::runtime_error("document id contains tab or newline: " + seq.doc_id);
        out << seq.doc_id << '\t';
        for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
            if (i) out << ' ';
            out << seq.tokens[i];
        }
        out << '\n';
    }
}

void write_corpus_file(std::vector<TokenSequence> corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open corpus file for writing: " + path);
    write_corpus(std::move(corpus), out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<TokenSequence> read_corpus(std::istream& in) {
    std::vector<TokenSequence> corpus;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0)
            throw std::runtime_error("corpus line " + std::to_string(lineno) +
                                     ": expected <doc_id> TAB <tokens>");
        TokenSequence seq;
        seq.doc_id = line.substr(0, tab);
        const char* p = line.data() + tab + 1;
        const char* end = line.data() + line.size();
        while (p < end) {
            while (p < end && *p == ' ') ++p;
            if (p == end) break;
            int value = 0;
            auto [next, ec] = std::from_chars(p, end, value);
            if (ec != std::errc())
                throw std::runtime_error("corpus line " + std::to_string(lineno) +
                                         ": malformed token near '" + std::string(p, end) + "'");
            seq.tokens.push_back(value);
            p = next;
        }
        corpus.push_back(std::move(seq));
    }
    std::unordered_set<std::string> seen;
    for (const TokenSequence& seq : corpus)
        if (!seen.insert(seq.doc_id).second)
            throw std::runtime_error("duplicate document id: " + seq.doc_id);
    return corpus;
}

std::vector<TokenSequence> read_corpus_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);
    return read_corpus(in);
}

}  // namespace bugpred
