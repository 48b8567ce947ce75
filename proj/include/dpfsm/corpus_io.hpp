#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dpfsm/base.hpp"
#include "dpfsm/dp.hpp"

namespace dpfsm {

enum class CorpusFormat { kLines, kFasta };

inline CorpusFormat parse_format(std::string_view name) {
    if (name == "lines") return CorpusFormat::kLines;
    if (name == "fasta") return CorpusFormat::kFasta;
    throw std::invalid_argument("unknown corpus format '" + std::string(name) + "'");
}

namespace detail {

inline std::vector<std::string> parse_lines(const std::string& blob) {
    std::vector<std::string> docs;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < blob.size()) {
        std::size_t nl = blob.find('\n', pos);
        std::string line = blob.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? blob.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty())
            throw std::runtime_error("empty document at line " + std::to_string(line_no));
        docs.push_back(std::move(line));
    }
    return docs;
}

inline std::vector<std::string> parse_fasta(const std::string& blob) {
    std::vector<std::string> docs;
    bool in_record = false;
    std::string seq;
    std::istringstream in(blob);
    std::string line;
    auto flush = [&]() {
        if (!in_record) return;
        if (seq.empty()) throw std::runtime_error("fasta record with empty sequence");
        docs.push_back(seq);
        seq.clear();
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '>') {
            flush();
            in_record = true;
            continue;
        }
        if (!in_record) throw std::runtime_error("fasta content before first '>' header");
        for (char c : line) seq += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    flush();
    return docs;
}

}  // namespace detail

// One document per line, or FASTA records (headers delimit documents,
// sequence lines concatenated and upper-cased). An empty corpus is an error.
inline std::vector<std::string> read_corpus(const std::string& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read input file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string blob = buf.str();
    std::vector<std::string> docs = format == CorpusFormat::kLines ? detail::parse_lines(blob)
                                                                   : detail::parse_fasta(blob);
    if (docs.empty()) throw std::runtime_error("empty corpus in '" + path + "'");
    return docs;
}

// Uniform random corpus over symbol ids 0..sigma-1; fixed document length.
inline std::vector<IdString> synth_corpus(std::int64_t n, std::int64_t ell, std::int64_t sigma,
                                          std::uint64_t seed) {
    if (n < 1 || ell < 1 || sigma < 1) throw std::invalid_argument("synth_corpus: bad shape");
    CounterRng rng(seed);
    std::vector<IdString> docs(static_cast<std::size_t>(n));
    for (auto& d : docs) {
        d.resize(static_cast<std::size_t>(ell));
        for (auto& s : d)
            s = static_cast<SymId>(rng.next_u64() % static_cast<std::uint64_t>(sigma));
    }
    return docs;
}

}  // namespace dpfsm
