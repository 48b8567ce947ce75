#include <catch2/catch_amalgamated.hpp>

#include "dpfsm/oracle.hpp"
#include "dpfsm/suffix_index.hpp"
#include "helpers.hpp"

using namespace dpfsm;
using testutil::enc;

namespace {

std::vector<EncodedString> encode_corpus(const Codebook& cb, const std::vector<IdString>& docs) {
    std::vector<EncodedString> encs;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        auto e = cb.encode(docs[i]);
        e.origin_doc = i;
        encs.push_back(std::move(e));
    }
    return encs;
}

std::int64_t corpus_aligned_count(const std::vector<EncodedString>& encs, const EncString& p,
                                  int round) {
    std::int64_t total = 0;
    for (const auto& e : encs) total += aligned_occurrences(e.symbols, p, round);
    return total;
}

std::int64_t freq_of(const SuffixIndex& idx, const EncString& p) {
    auto loc = idx.locus_of(p);
    return loc ? idx.freq_at(*loc) : 0;
}

}  // namespace

TEST_CASE("figure-2 corpus index frequencies") {
    auto a = CharAlphabet::from_symbols("ACGT");
    auto cb = Codebook::build(4);
    auto docs = testutil::corpus_of(a, {"CGCA", "CGCA", "CATA"});
    auto encs = encode_corpus(cb, docs);
    auto idx = SuffixIndex::build(encs, 3);

    CHECK(idx.suffix_count() == 15);  // 3 * (12 + 3) / 3
    CHECK(idx.freq_at(idx.root_locus()) == 15);

    CHECK(freq_of(idx, enc("01$")) == 5);
    CHECK(freq_of(idx, enc("01$10$01$00$")) == 2);
    CHECK(freq_of(idx, enc("01$00$11$")) == 1);  // CAT
    CHECK(freq_of(idx, enc("10$01$")) == 2);     // GC
    CHECK_FALSE(idx.locus_of(enc("11$11$")).has_value());

    // delimiters are never traversed
    EncString with_delim = enc("01$");
    with_delim.push_back(kDelimBase);
    CHECK_FALSE(idx.locus_of(with_delim).has_value());

    SECTION("stepping reveals one symbol and its frequency at a time") {
        Locus loc = idx.root_locus();
        for (EncSym s : enc("01$")) {
            auto next = idx.step(loc, s);
            REQUIRE(next.has_value());
            loc = *next;
        }
        CHECK(idx.freq_at(loc) == 5);

        auto cg = idx.locus_of(enc("01$10$"));
        REQUIRE(cg.has_value());
        CHECK(idx.freq_at(*cg) == 2);
        auto deeper = idx.step(*cg, kBit0);
        REQUIRE(deeper.has_value());
        CHECK(idx.freq_at(*deeper) == 2);
        CHECK(deeper->depth == cg->depth + 1);
    }
}

TEST_CASE("single short string") {
    std::vector<EncodedString> one{{enc("0$"), 0}};
    auto idx = SuffixIndex::build(one, 2);
    // the delimiter run contributes one r-spaced suffix of its own
    CHECK(idx.suffix_count() == 2);
    CHECK(idx.freq_at(idx.root_locus()) == 2);
    CHECK(freq_of(idx, enc("0$")) == 1);
    // exactly one non-delimiter path leaves the root
    int content_children = 0;
    for (std::int32_t c = idx.first_child(0); c != -1; c = idx.next_sibling(c))
        if (!is_delimiter(idx.first_symbol(c))) ++content_children;
    CHECK(content_children == 1);
}

TEST_CASE("figure-2 candidate tree") {
    std::vector<EncodedString> cand{
        {enc("01$00$"), std::nullopt},
        {enc("01$10$"), std::nullopt},
        {enc("10$01$"), std::nullopt},
    };
    auto idx = SuffixIndex::build(cand, 3);
    CHECK(idx.suffix_count() == 9);  // offsets 1 and 4 of each string, plus delimiter runs
    for (auto p : {"01$00$", "00$", "01$10$", "10$", "10$01$", "01$"})
        CHECK(idx.locus_of(enc(p)).has_value());
    CHECK(freq_of(idx, enc("01$")) == 3);
    CHECK(freq_of(idx, enc("10$")) == 2);
    CHECK_FALSE(idx.locus_of(enc("11$")).has_value());
}

TEST_CASE("build validations") {
    CHECK_THROWS_AS(SuffixIndex::build(std::vector<EncodedString>{{enc("0$0"), 0}}, 2),
                    std::invalid_argument);
    EncString bad = enc("0$");
    bad.push_back(kDelimBase + 5);
    bad.push_back(kBit0);
    bad.push_back(kBit0);
    CHECK_THROWS_AS(SuffixIndex::build(std::vector<EncodedString>{{bad, 0}}, 2),
                    std::invalid_argument);
    // empty input builds an empty index
    auto idx = SuffixIndex::build(std::vector<EncodedString>{}, 3);
    CHECK(idx.suffix_count() == 0);
    CHECK(idx.node_count() == 1);
}

TEST_CASE("index structure invariants on random corpora") {
    CounterRng rng(1234);
    for (int it = 0; it < 60; ++it) {
        std::int64_t sigma = 1 + static_cast<std::int64_t>(rng.next_u64() % 8);
        std::int64_t n = 1 + static_cast<std::int64_t>(rng.next_u64() % 12);
        std::int64_t max_len = 1 + static_cast<std::int64_t>(rng.next_u64() % 14);
        auto cb = Codebook::build(static_cast<std::size_t>(sigma));
        auto docs = testutil::random_corpus(rng, n, max_len, sigma);
        auto encs = encode_corpus(cb, docs);
        auto idx = SuffixIndex::build(encs, cb.round());

        std::int64_t expect_leaves = 0;
        for (const auto& e : encs)
            expect_leaves += static_cast<std::int64_t>(e.symbols.size()) / cb.round() + 1;
        CHECK(idx.suffix_count() == expect_leaves);
        CHECK(idx.freq_at(idx.root_locus()) == expect_leaves);

        for (std::int32_t v = 0; v < idx.node_count(); ++v) {
            if (idx.is_leaf(v)) {
                CHECK(idx.subtree_leaves(v) == 1);
                continue;
            }
            std::int64_t sum = 0;
            EncSym prev_sym = 0;
            bool first = true;
            for (std::int32_t c = idx.first_child(v); c != -1; c = idx.next_sibling(c)) {
                sum += idx.subtree_leaves(c);
                CHECK(idx.subtree_leaves(c) <= idx.subtree_leaves(v));  // monotone
                if (!first) CHECK(idx.first_symbol(c) > prev_sym);      // sorted chain
                prev_sym = idx.first_symbol(c);
                first = false;
                CHECK(idx.parent(c) == v);
                CHECK(idx.string_depth(c) == idx.string_depth(v) + idx.edge_length(c));
            }
            CHECK(idx.subtree_leaves(v) == sum);
        }
    }
}

TEST_CASE("oracle equivalence: locus frequency equals aligned occurrence count") {
    CounterRng rng(99);
    for (int it = 0; it < 30; ++it) {
        std::int64_t sigma = 2 + static_cast<std::int64_t>(rng.next_u64() % 7);
        std::int64_t n = 1 + static_cast<std::int64_t>(rng.next_u64() % 10);
        std::int64_t max_len = 1 + static_cast<std::int64_t>(rng.next_u64() % 12);
        auto cb = Codebook::build(static_cast<std::size_t>(sigma));
        auto docs = testutil::random_corpus(rng, n, max_len, sigma);
        auto encs = encode_corpus(cb, docs);
        auto idx = SuffixIndex::build(encs, cb.round());
        const auto r = static_cast<std::size_t>(cb.round());

        // every aligned window of every document, all lengths
        for (const auto& e : encs) {
            for (std::size_t start = 0; start < e.symbols.size(); start += r) {
                for (std::size_t len = 1; start + len <= e.symbols.size(); ++len) {
                    EncString p = e.symbols.substr(start, len);
                    CHECK(freq_of(idx, p) == corpus_aligned_count(encs, p, cb.round()));
                }
            }
        }
        // random negative probes
        for (int probe = 0; probe < 20; ++probe) {
            EncString p;
            auto len = 1 + rng.next_u64() % 9;
            for (std::uint64_t j = 0; j < len; ++j)
                p.push_back(static_cast<EncSym>(rng.next_u64() % 3));
            CHECK(freq_of(idx, p) == corpus_aligned_count(encs, p, cb.round()));
        }
    }
}

TEST_CASE("debug dump is deterministic and shaped") {
    std::vector<EncodedString> cand{{enc("0$"), std::nullopt}, {enc("1$"), std::nullopt}};
    auto idx = SuffixIndex::build(cand, 2);
    auto idx2 = SuffixIndex::build(cand, 2);
    std::string d = idx.dump();
    CHECK(d == idx2.dump());
    // suffixes of the concatenation 0$#0#0 1$#1#1 at even offsets
    CHECK(d ==
          "[root] depth=0 count=4\n"
          "  [0$#0#01$#1#1] depth=8 count=1\n"
          "  [1$#1#1] depth=4 count=1\n"
          "  [#0#01$#1#1] depth=6 count=1\n"
          "  [#1#1] depth=2 count=1\n");
}
