#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dpfsm/base.hpp"
#include "dpfsm/codec.hpp"
#include "dpfsm/dp.hpp"

namespace testutil {

using namespace dpfsm;

// "01$10$1" -> encoded symbols
inline EncString enc(std::string_view s) {
    EncString out;
    for (char c : s) {
        switch (c) {
            case '0': out.push_back(kBit0); break;
            case '1': out.push_back(kBit1); break;
            case '$': out.push_back(kTerm); break;
            default: throw std::invalid_argument("enc: bad char");
        }
    }
    return out;
}

inline IdString ids_of(const CharAlphabet& a, std::string_view doc) {
    return a.intern(doc);
}

inline std::vector<IdString> corpus_of(const CharAlphabet& a,
                                       std::initializer_list<std::string_view> docs) {
    std::vector<IdString> out;
    for (auto d : docs) out.push_back(a.intern(d));
    return out;
}

// Random corpus over ids 0..sigma-1 with per-document lengths in [1, max_len].
inline std::vector<IdString> random_corpus(CounterRng& rng, std::int64_t n, std::int64_t max_len,
                                           std::int64_t sigma) {
    std::vector<IdString> docs(static_cast<std::size_t>(n));
    for (auto& d : docs) {
        auto len = 1 + static_cast<std::size_t>(rng.next_u64() %
                                                static_cast<std::uint64_t>(max_len));
        d.resize(len);
        for (auto& s : d)
            s = static_cast<SymId>(rng.next_u64() % static_cast<std::uint64_t>(sigma));
    }
    return docs;
}

}  // namespace testutil
