#pragma once

#include <cstdint>
#include <vector>

#include "dpfsm/codec.hpp"
#include "dpfsm/corpus_io.hpp"
#include "dpfsm/miner.hpp"

namespace dpfsm {

struct BenchPoint {
    std::int64_t n = 0;
    std::int64_t ell = 0;
    double build_ms = 0;
    double mine_ms = 0;
    double total_ms = 0;
    std::int64_t peak_nodes = 0;  // corpus index + largest simultaneous phase trie
    std::int64_t output_rows = 0;
};

inline BenchPoint bench_once(std::int64_t n, std::int64_t ell, std::int64_t sigma,
                             double epsilon, double beta, std::uint64_t seed) {
    std::vector<IdString> docs = synth_corpus(n, ell, sigma, seed);
    Codebook cb = Codebook::build(static_cast<std::size_t>(sigma));
    MinerConfig cfg;
    cfg.epsilon = epsilon;
    cfg.beta = beta;
    cfg.seed = seed;
    MiningReport rep = mine(docs, cb, cfg);
    BenchPoint p;
    p.n = n;
    p.ell = ell;
    p.build_ms = rep.build_ms;
    p.mine_ms = rep.search_ms;
    p.total_ms = rep.build_ms + rep.search_ms;
    p.peak_nodes = rep.corpus_nodes + rep.peak_phase_nodes;
    p.output_rows = static_cast<std::int64_t>(rep.rows.size());
    return p;
}

}  // namespace dpfsm
