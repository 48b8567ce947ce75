#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "dpfsm/base.hpp"
#include "dpfsm/codec.hpp"

namespace dpfsm {

using Corpus = std::vector<IdString>;

// Exhaustive sliding-window counts over the original alphabet. Ground truth
// for everything the index and the miner report; performance is a non-goal.
struct FrequencyTable {
    std::unordered_map<IdString, std::int64_t> counts;
    std::int64_t max_len = 0;

    std::int64_t count(const IdString& p) const {
        auto it = counts.find(p);
        return it == counts.end() ? 0 : it->second;
    }
};

inline FrequencyTable brute_frequencies(const Corpus& corpus, std::int64_t max_len) {
    if (max_len < 1) throw std::invalid_argument("brute_frequencies: max_len must be >= 1");
    FrequencyTable table;
    table.max_len = max_len;
    for (const IdString& doc : corpus) {
        for (std::size_t start = 0; start < doc.size(); ++start) {
            std::size_t limit = std::min<std::size_t>(static_cast<std::size_t>(max_len),
                                                      doc.size() - start);
            for (std::size_t len = 1; len <= limit; ++len)
                ++table.counts[doc.substr(start, len)];
        }
    }
    return table;
}

// {P : freq_D(P) >= threshold}, all lengths up to the longest document.
inline std::set<IdString> brute_frequent(const Corpus& corpus, double threshold) {
    std::size_t max_len = 0;
    for (const IdString& doc : corpus) max_len = std::max(max_len, doc.size());
    std::set<IdString> out;
    if (max_len == 0) return out;
    FrequencyTable table = brute_frequencies(corpus, static_cast<std::int64_t>(max_len));
    for (const auto& [p, c] : table.counts)
        if (static_cast<double>(c) >= threshold) out.insert(p);
    return out;
}

// Occurrences of `pattern` in `text` starting at positions == 0 (mod round),
// i.e. character-aligned occurrences in an encoded document.
inline std::int64_t aligned_occurrences(const EncString& text, const EncString& pattern,
                                        int round) {
    if (pattern.empty() || pattern.size() > text.size()) return 0;
    std::int64_t hits = 0;
    for (std::size_t p = 0; p + pattern.size() <= text.size();
         p += static_cast<std::size_t>(round))
        if (text.compare(p, pattern.size(), pattern) == 0) ++hits;
    return hits;
}

// L1 distance between the length-k character-aligned encoded count vectors of
// the corpus and its neighbor with one document replaced.
inline double measure_sensitivity(const Codebook& cb, const Corpus& corpus,
                                  const IdString& replacement, std::int64_t k,
                                  std::size_t replaced_index = 0) {
    if (replaced_index >= corpus.size())
        throw std::invalid_argument("measure_sensitivity: replaced_index out of range");
    if (k < 1) throw std::invalid_argument("measure_sensitivity: k must be >= 1");
    const auto r = static_cast<std::size_t>(cb.round());
    auto window_counts = [&](const Corpus& docs) {
        std::unordered_map<EncString, std::int64_t> m;
        for (const IdString& doc : docs) {
            EncString enc = cb.encode(doc).symbols;
            if (enc.size() < static_cast<std::size_t>(k)) continue;
            for (std::size_t p = 0; p + static_cast<std::size_t>(k) <= enc.size(); p += r)
                ++m[enc.substr(p, static_cast<std::size_t>(k))];
        }
        return m;
    };
    Corpus neighbor = corpus;
    neighbor[replaced_index] = replacement;
    auto a = window_counts(corpus);
    auto b = window_counts(neighbor);
    double l1 = 0;
    for (const auto& [w, c] : a) {
        auto it = b.find(w);
        l1 += std::abs(static_cast<double>(c) - (it == b.end() ? 0.0 : static_cast<double>(it->second)));
    }
    for (const auto& [w, c] : b)
        if (!a.count(w)) l1 += static_cast<double>(c);
    return l1;
}

}  // namespace dpfsm
