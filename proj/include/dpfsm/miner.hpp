#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "dpfsm/base.hpp"
#include "dpfsm/codec.hpp"
#include "dpfsm/dp.hpp"
#include "dpfsm/hld.hpp"
#include "dpfsm/suffix_index.hpp"

namespace dpfsm {

struct MinerProbe;

struct MinerConfig {
    double epsilon = 1.0;
    double beta = 0.1;
    std::optional<double> tau_bot;  // default: ell * ceil(log2(ell_bit))
    std::uint64_t seed = 1;
    bool noiseless = false;
    std::optional<double> tau_override;  // accepted only with noiseless
    MinerProbe* probe = nullptr;
};

struct OutputRow {
    IdString pattern;
    std::int64_t length = 0;  // characters of the original alphabet
    double noisy_freq = 0;
    int phase = 0;
};

struct PhaseStats {
    int phase = 0;
    std::int64_t k = 0;  // candidate length entering the phase (bits)
    std::int64_t visited = 0;
    std::int64_t accepted = 0;
    std::int64_t pruned = 0;
};

struct MiningReport {
    std::vector<OutputRow> rows;
    std::vector<PhaseStats> phases;
    double epsilon0 = 0, sigma = 0, tau_star = 0, tau = 0, tau_top = 0, tau_bot = 0;
    bool terminated = false;
    std::uint64_t seed = 0;
    std::int64_t n_docs = 0, ell = 0, ell_bit = 0;
    int round = 0;
    std::int64_t corpus_nodes = 0, peak_phase_nodes = 0;
    double build_ms = 0, search_ms = 0;
};

// Test hook: candidate sets of the phases that actually searched, plus every
// ledger entry in acceptance order.
struct MinerProbe {
    struct Phase {
        std::int64_t k;
        std::vector<EncString> candidates;
    };
    std::vector<Phase> searched_phases;
    std::vector<std::pair<EncString, double>> accepted;
};

namespace detail {

// Trie over accepted encoded strings; undecodable leaves are dropped in one
// depth-first pass when the report is assembled.
class OutputTrie {
public:
    OutputTrie() : nodes_(1) {}

    void insert(const EncString& s, double f, int phase) {
        std::int32_t v = 0;
        for (EncSym sym : s) {
            auto [it, fresh] = nodes_[static_cast<std::size_t>(v)].kids.try_emplace(sym, 0);
            if (fresh) {
                it->second = static_cast<std::int32_t>(nodes_.size());
                nodes_.emplace_back();
            }
            v = it->second;
        }
        Node& node = nodes_[static_cast<std::size_t>(v)];
        node.terminal = true;
        node.f = f;
        node.phase = phase;
    }

    template <class Fn>
    void for_each_terminal(Fn&& fn) const {
        EncString path;
        walk(0, path, fn);
    }

private:
    struct Node {
        std::map<EncSym, std::int32_t> kids;
        double f = 0;
        int phase = 0;
        bool terminal = false;
    };

    template <class Fn>
    void walk(std::int32_t v, EncString& path, Fn&& fn) const {
        const Node& node = nodes_[static_cast<std::size_t>(v)];
        if (node.terminal) fn(path, node.f, node.phase);
        for (const auto& [sym, child] : node.kids) {
            path.push_back(sym);
            walk(child, path, fn);
            path.pop_back();
        }
    }

    std::vector<Node> nodes_;
};

struct Accepted {
    EncString enc;
    double noisy_freq = 0;
    int phase = 0;
    std::optional<Locus> corpus_locus;
};

// Depth-first search over one concatenated tree s . T_k, mirroring every step
// in the corpus index for exact frequencies and running one binary tree
// mechanism per heavy path entered (Algorithm 2 semantics: heads start a
// fresh counter with freq(str(u)), every later position on the path feeds the
// difference to its parent position).
class PhaseSearcher {
public:
    PhaseSearcher(const SuffixIndex& tk, const HeavyPathDecomposition& dec,
                  const SuffixIndex& corpus, double tau, double sigma, std::int64_t depth_cap,
                  int phase, std::vector<std::vector<Accepted>>& by_len, OutputTrie& trie,
                  PhaseStats& stats, CounterRng& rng, MinerProbe* probe)
        : tk_(tk), dec_(dec), corpus_(corpus), tau_(tau), sigma_(sigma), depth_cap_(depth_cap),
          phase_(phase), by_len_(by_len), trie_(trie), stats_(stats), rng_(rng), probe_(probe) {}

    void run(const Accepted& start) {
        cur_ = start.enc;
        std::optional<Locus> c_loc = start.corpus_locus;
        double f_start = c_loc ? static_cast<double>(corpus_.freq_at(*c_loc)) : 0.0;
        // node(s) is the head of the root heavy path of s . T_k; prime its
        // counter so on-path children can stream differences.
        counters_.push_back({0, BtmCounter(dec_.path_length_bits(0), sigma_, rng_.split())});
        counters_.back().btm.increment(f_start);
        dfs(tk_.root_locus(), c_loc, f_start, static_cast<std::int64_t>(cur_.size()));
        counters_.pop_back();
    }

private:
    struct ActiveCounter {
        std::int32_t head;
        BtmCounter btm;
    };

    void dfs(const Locus& t_loc, const std::optional<Locus>& c_loc, double f_here,
             std::int64_t depth) {
        if (depth >= depth_cap_) return;
        if (t_loc.offset == 0) {
            for (std::int32_t c = tk_.first_child(t_loc.node); c != -1; c = tk_.next_sibling(c)) {
                EncSym sym = tk_.first_symbol(c);
                if (is_delimiter(sym)) break;  // delimiter children end the sorted chain
                visit(*tk_.step(t_loc, sym), sym, c_loc, f_here, depth);
            }
        } else {
            EncSym sym = *tk_.symbol_after(t_loc);
            if (!is_delimiter(sym)) visit(*tk_.step(t_loc, sym), sym, c_loc, f_here, depth);
        }
    }

    void visit(const Locus& t_next, EncSym sym, const std::optional<Locus>& c_loc,
               double f_parent, std::int64_t depth) {
        std::optional<Locus> c_next = c_loc ? corpus_.step(*c_loc, sym) : std::nullopt;
        double f = c_next ? static_cast<double>(corpus_.freq_at(*c_next)) : 0.0;
        double est = noisy_count(t_next, f, f_parent);
        ++stats_.visited;
        cur_.push_back(sym);
        if (est > tau_) {
            ++stats_.accepted;
            record(est, c_next);
            dfs(t_next, c_next, f, depth + 1);
        } else {
            ++stats_.pruned;
        }
        cur_.pop_back();
        if (dec_.is_path_start(tk_, t_next)) counters_.pop_back();
    }

    double noisy_count(const Locus& t_next, double f, double f_parent) {
        if (dec_.is_path_start(tk_, t_next)) {
            std::int32_t head = dec_.path_head_node(t_next.node);
            counters_.push_back(
                {head, BtmCounter(dec_.path_length_bits(head), sigma_, rng_.split())});
            counters_.back().btm.increment(f);
        } else {
            if (counters_.empty() ||
                counters_.back().head != dec_.path_head_node(t_next.node))
                throw std::logic_error("miner: no live counter for heavy path");
            counters_.back().btm.increment(f - f_parent);
        }
        return counters_.back().btm.query();
    }

    void record(double est, const std::optional<Locus>& c_next) {
        by_len_[cur_.size()].push_back({cur_, est, phase_, c_next});
        trie_.insert(cur_, est, phase_);
        if (probe_) probe_->accepted.emplace_back(cur_, est);
    }

    const SuffixIndex& tk_;
    const HeavyPathDecomposition& dec_;
    const SuffixIndex& corpus_;
    double tau_, sigma_;
    std::int64_t depth_cap_;
    int phase_;
    std::vector<std::vector<Accepted>>& by_len_;
    OutputTrie& trie_;
    PhaseStats& stats_;
    CounterRng& rng_;
    MinerProbe* probe_;
    std::vector<ActiveCounter> counters_;
    EncString cur_;
};

}  // namespace detail

// End-to-end mining run: encode, index, Laplace-screen the codewords, then
// per phase build the candidate trie T_k, decompose it and extend candidates
// with noisy counts; output is the decoded union of whole-character lengths.
inline MiningReport mine(std::span<const IdString> docs, const Codebook& cb,
                         const MinerConfig& cfg) {
    using clock = std::chrono::steady_clock;
    if (!(cfg.beta > 0 && cfg.beta < 1)) throw std::invalid_argument("beta must lie in (0,1)");
    if (cfg.epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
    if (cfg.tau_override && !cfg.noiseless)
        throw std::invalid_argument("tau override requires noiseless mode");
    if (cfg.tau_override && *cfg.tau_override < 0)
        throw std::invalid_argument("tau override must be >= 0");
    if (cfg.tau_bot && *cfg.tau_bot < 0) throw std::invalid_argument("tau_bot must be >= 0");

    MiningReport report;
    report.seed = cfg.seed;
    report.round = cb.round();
    report.n_docs = static_cast<std::int64_t>(docs.size());

    std::int64_t ell = 0;
    for (const auto& d : docs) ell = std::max<std::int64_t>(ell, static_cast<std::int64_t>(d.size()));
    if (docs.empty() || ell == 0) return report;  // degenerate corpus: nothing to release
    for (const auto& d : docs)
        if (d.empty()) throw std::invalid_argument("documents must be non-empty");

    const int r = cb.round();
    const std::int64_t ell_bit = ell * r;
    report.ell = ell;
    report.ell_bit = ell_bit;

    NoiseConfig nc = NoiseConfig::derive(cfg.epsilon, cfg.beta, report.n_docs, ell, ell_bit,
                                         cfg.noiseless, cfg.seed);
    report.epsilon0 = nc.epsilon0;
    report.sigma = nc.sigma;
    report.tau_star = static_cast<double>(formula_log2(ell_bit)) *
                      std::log(static_cast<double>(report.n_docs * ell_bit) / cfg.beta) /
                      nc.epsilon0;
    report.tau_bot = cfg.tau_bot.value_or(static_cast<double>(ell * formula_log2(ell_bit)));
    report.tau = cfg.tau_override ? *cfg.tau_override : 4.0 * report.tau_star + report.tau_bot;
    report.tau_top = 9.0 * report.tau_star;
    if (!cfg.noiseless && report.tau_top < report.tau)
        throw std::invalid_argument(
            "thresholds inverted (tau_top < tau): epsilon too large for this tau_bot");

    auto t0 = clock::now();
    std::vector<EncodedString> encs;
    encs.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        EncodedString e = cb.encode(docs[i]);
        e.origin_doc = i;
        encs.push_back(std::move(e));
    }
    SuffixIndex corpus_idx = SuffixIndex::build(encs, r);
    report.corpus_nodes = corpus_idx.node_count();
    auto t1 = clock::now();
    report.build_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    CounterRng master(cfg.seed);
    std::vector<std::vector<detail::Accepted>> by_len(static_cast<std::size_t>(ell_bit) + 1);
    detail::OutputTrie trie;

    // Phase 1: Laplace screening of E's image.
    {
        CounterRng rng1 = master.split();
        PhaseStats stats;
        stats.phase = 1;
        stats.k = r;
        double scale = cfg.noiseless
                           ? 0.0
                           : 2.0 * static_cast<double>(ell) *
                                 static_cast<double>(formula_log2(ell)) / cfg.epsilon;
        for (SymId id = 0; id < static_cast<SymId>(cb.alphabet_size()); ++id) {
            const EncString& gamma = cb.codeword(id);
            auto loc = corpus_idx.locus_of(gamma);
            double f = loc ? static_cast<double>(corpus_idx.freq_at(*loc)) : 0.0;
            double est = f + laplace(scale, rng1);
            ++stats.visited;
            if (est > report.tau) {
                ++stats.accepted;
                by_len[static_cast<std::size_t>(r)].push_back({gamma, est, 1, loc});
                trie.insert(gamma, est, 1);
                if (cfg.probe) cfg.probe->accepted.emplace_back(gamma, est);
            } else {
                ++stats.pruned;
            }
        }
        report.phases.push_back(stats);
    }

    // Doubling phases: extend C_k along the candidate trie of its suffixes.
    int phase_no = 2;
    for (std::int64_t k = r; k < ell_bit; k *= 2, ++phase_no) {
        auto& ck = by_len[static_cast<std::size_t>(k)];
        if (ck.empty()) break;
        std::sort(ck.begin(), ck.end(),
                  [](const detail::Accepted& a, const detail::Accepted& b) { return a.enc < b.enc; });

        std::vector<EncodedString> cand;
        cand.reserve(ck.size());
        for (const auto& a : ck) cand.push_back({a.enc, std::nullopt});
        SuffixIndex tk = SuffixIndex::build(cand, r);
        report.peak_phase_nodes = std::max(report.peak_phase_nodes, tk.node_count());
        HeavyPathDecomposition dec = HeavyPathDecomposition::decompose(tk);

        if (!cfg.noiseless &&
            static_cast<double>(ck.size()) >
                static_cast<double>(report.n_docs) / static_cast<double>(formula_log2(ell_bit))) {
            report.terminated = true;
            break;
        }
        if (cfg.probe) {
            MinerProbe::Phase ph;
            ph.k = k;
            for (const auto& a : ck) ph.candidates.push_back(a.enc);
            cfg.probe->searched_phases.push_back(std::move(ph));
        }

        PhaseStats stats;
        stats.phase = phase_no;
        stats.k = k;
        CounterRng phase_rng = master.split();
        std::int64_t depth_cap = std::min<std::int64_t>(2 * k, ell_bit);
        detail::PhaseSearcher searcher(tk, dec, corpus_idx, report.tau, nc.sigma, depth_cap,
                                       phase_no, by_len, trie, stats, phase_rng, cfg.probe);
        for (const auto& s : ck) searcher.run(s);
        report.phases.push_back(stats);
    }

    // Output: whole-character lengths that decode; everything else is pruned.
    trie.for_each_terminal([&](const EncString& enc, double f, int phase) {
        if (enc.size() % static_cast<std::size_t>(r) != 0) return;
        auto ids = cb.decode(enc);
        if (!ids) return;
        report.rows.push_back(
            {std::move(*ids), static_cast<std::int64_t>(enc.size()) / r, f, phase});
    });
    std::sort(report.rows.begin(), report.rows.end(), [](const OutputRow& a, const OutputRow& b) {
        return a.length != b.length ? a.length < b.length : a.pattern < b.pattern;
    });
    auto t2 = clock::now();
    report.search_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
    return report;
}

}  // namespace dpfsm
