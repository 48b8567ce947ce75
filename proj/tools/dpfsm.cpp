// dpfsm: differentially private frequent-substring mining over line or FASTA
// corpora, plus a brute-force oracle and a scaling benchmark.

#include <cinttypes>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpfsm/bench.hpp"
#include "dpfsm/codec.hpp"
#include "dpfsm/corpus_io.hpp"
#include "dpfsm/miner.hpp"
#include "dpfsm/oracle.hpp"

namespace {

using namespace dpfsm;

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

struct CorpusInput {
    std::vector<std::string> raw;
    CharAlphabet alphabet = CharAlphabet::from_symbols("?");
    std::vector<IdString> docs;
    Codebook codebook = Codebook::build(1);
};

CorpusInput load_corpus(const std::string& path, const std::string& format,
                        const std::string& alphabet_spec) {
    CorpusInput in;
    in.raw = read_corpus(path, parse_format(format));
    in.alphabet = alphabet_spec == "auto" ? CharAlphabet::infer(in.raw)
                                          : CharAlphabet::from_symbols(alphabet_spec);
    in.docs.reserve(in.raw.size());
    for (const auto& d : in.raw) in.docs.push_back(in.alphabet.intern(d));
    in.codebook = Codebook::build(in.alphabet.size());
    return in;
}

int run_mine(const std::string& input, const std::string& format, const std::string& alphabet,
             double epsilon, double beta, const std::optional<double>& tau_bot,
             std::optional<std::uint64_t> seed_opt, bool noiseless,
             const std::optional<double>& tau_override, const std::string& output, bool stats) {
    if (tau_override && !noiseless) {
        std::fprintf(stderr, "error: --tau is only accepted together with --noiseless\n");
        return 1;
    }
    CorpusInput in = load_corpus(input, format, alphabet);

    std::uint64_t seed = seed_opt ? *seed_opt : std::random_device{}();
    MinerConfig cfg;
    cfg.epsilon = epsilon;
    cfg.beta = beta;
    cfg.tau_bot = tau_bot;
    cfg.seed = seed;
    cfg.noiseless = noiseless;
    cfg.tau_override = tau_override;
    MiningReport rep = mine(in.docs, in.codebook, cfg);

    const bool jsonl = output == "jsonl";
    if (jsonl) {
        std::printf("{\"meta\":{\"seed\":%" PRIu64 "}}\n", seed);
    } else {
        std::printf("# seed\t%" PRIu64 "\n", seed);
    }
    for (const auto& row : rep.rows) {
        std::string pattern = in.alphabet.externalize(row.pattern);
        if (jsonl) {
            std::printf("{\"pattern\":\"%s\",\"len\":%" PRId64 ",\"noisy_freq\":%.6f,\"phase\":%d}\n",
                        json_escape(pattern).c_str(), row.length, row.noisy_freq, row.phase);
        } else {
            std::printf("%s\t%" PRId64 "\t%.6f\t%d\n", pattern.c_str(), row.length,
                        row.noisy_freq, row.phase);
        }
    }
    if (stats) {
        std::int64_t visited = 0, accepted = 0, pruned = 0;
        for (const auto& p : rep.phases) {
            visited += p.visited;
            accepted += p.accepted;
            pruned += p.pruned;
        }
        if (jsonl) {
            std::printf("{\"stats\":{\"eps0\":%.9g,\"sigma\":%.9g,\"tau_star\":%.9g,"
                        "\"tau\":%.9g,\"tau_top\":%.9g,\"tau_bot\":%.9g,"
                        "\"visited\":%" PRId64 ",\"accepted\":%" PRId64 ",\"pruned\":%" PRId64
                        ",\"terminated\":%s}}\n",
                        rep.epsilon0, rep.sigma, rep.tau_star, rep.tau, rep.tau_top, rep.tau_bot,
                        visited, accepted, pruned, rep.terminated ? "true" : "false");
        } else {
            std::printf("# eps0\t%.9g\n# sigma\t%.9g\n# tau_star\t%.9g\n# tau\t%.9g\n"
                        "# tau_top\t%.9g\n# tau_bot\t%.9g\n# visited\t%" PRId64
                        "\n# accepted\t%" PRId64 "\n# pruned\t%" PRId64 "\n# terminated\t%d\n",
                        rep.epsilon0, rep.sigma, rep.tau_star, rep.tau, rep.tau_top, rep.tau_bot,
                        visited, accepted, pruned, rep.terminated ? 1 : 0);
        }
    }
    return rep.terminated ? 2 : 0;
}

int run_oracle(const std::string& input, const std::string& format, const std::string& alphabet,
               double tau) {
    CorpusInput in = load_corpus(input, format, alphabet);
    auto frequent = brute_frequent(in.docs, tau);
    FrequencyTable table = brute_frequencies(
        in.docs, static_cast<std::int64_t>(
                     std::max_element(in.docs.begin(), in.docs.end(),
                                      [](const IdString& a, const IdString& b) {
                                          return a.size() < b.size();
                                      })
                         ->size()));
    std::vector<const IdString*> rows(frequent.size());
    std::size_t i = 0;
    for (const auto& p : frequent) rows[i++] = &p;
    std::sort(rows.begin(), rows.end(), [](const IdString* a, const IdString* b) {
        return a->size() != b->size() ? a->size() < b->size() : *a < *b;
    });
    for (const IdString* p : rows)
        std::printf("%s\t%zu\t%.6f\n", in.alphabet.externalize(*p).c_str(), p->size(),
                    static_cast<double>(table.count(*p)));
    return 0;
}

int run_bench(const std::vector<std::int64_t>& ns, const std::vector<std::int64_t>& ells,
              std::int64_t sigma, double epsilon, double beta, std::uint64_t seed) {
    std::printf("# seed\t%" PRIu64 "\n", seed);
    std::printf("n\tell\tbuild_ms\tmine_ms\ttotal_ms\tpeak_nodes\trows\n");
    for (std::int64_t ell : ells) {
        for (std::int64_t n : ns) {
            BenchPoint p = bench_once(n, ell, sigma, epsilon, beta, seed);
            std::printf("%" PRId64 "\t%" PRId64 "\t%.1f\t%.1f\t%.1f\t%" PRId64 "\t%" PRId64 "\n",
                        p.n, p.ell, p.build_ms, p.mine_ms, p.total_ms, p.peak_nodes,
                        p.output_rows);
            std::fflush(stdout);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"differentially private frequent-substring mining"};
    app.require_subcommand(1);

    std::string input, format = "lines", alphabet = "auto", output = "tsv";
    double epsilon = 1.0, beta = 0.1;
    std::optional<double> tau_bot, tau_override;
    std::optional<std::uint64_t> seed_opt;
    bool noiseless = false, stats = false;

    auto* mine_cmd = app.add_subcommand("mine", "mine frequent substrings under epsilon-DP");
    mine_cmd->add_option("--input", input, "corpus file")->required();
    mine_cmd->add_option("--format", format, "corpus format")
        ->check(CLI::IsMember({"lines", "fasta"}));
    mine_cmd->add_option("--alphabet", alphabet, "symbol list, or 'auto' to infer");
    mine_cmd->add_option("--epsilon", epsilon, "privacy budget");
    mine_cmd->add_option("--beta", beta, "failure probability");
    mine_cmd->add_option("--tau-bot", tau_bot, "lower threshold (default per the thresholds)");
    mine_cmd->add_option("--seed", seed_opt, "reproducibility seed (random if omitted)");
    mine_cmd->add_flag("--noiseless", noiseless, "exact test mode, no noise drawn");
    mine_cmd->add_option("--tau", tau_override, "threshold override (requires --noiseless)");
    mine_cmd->add_option("--output", output, "output format")
        ->check(CLI::IsMember({"tsv", "jsonl"}));
    mine_cmd->add_flag("--stats", stats, "append realized thresholds and counters");

    double oracle_tau = 1.0;
    auto* oracle_cmd = app.add_subcommand("oracle", "brute-force frequent substrings (freq >= tau)");
    oracle_cmd->add_option("--input", input, "corpus file")->required();
    oracle_cmd->add_option("--format", format, "corpus format")
        ->check(CLI::IsMember({"lines", "fasta"}));
    oracle_cmd->add_option("--alphabet", alphabet, "symbol list, or 'auto' to infer");
    oracle_cmd->add_option("--tau", oracle_tau, "frequency threshold (inclusive)");

    std::vector<std::int64_t> bench_n{10000, 20000, 40000}, bench_ell{64};
    std::int64_t bench_sigma = 4;
    double bench_eps = 2000.0, bench_beta = 0.1;
    std::uint64_t bench_seed = 42;
    auto* bench_cmd = app.add_subcommand("bench", "time index build + mining on synthetic corpora");
    bench_cmd->add_option("--n", bench_n, "corpus sizes");
    bench_cmd->add_option("--ell", bench_ell, "document lengths");
    bench_cmd->add_option("--alphabet-size", bench_sigma, "synthetic alphabet size");
    bench_cmd->add_option("--epsilon", bench_eps, "privacy budget");
    bench_cmd->add_option("--beta", bench_beta, "failure probability");
    bench_cmd->add_option("--seed", bench_seed, "synthesis + noise seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (mine_cmd->parsed())
            return run_mine(input, format, alphabet, epsilon, beta, tau_bot, seed_opt, noiseless,
                            tau_override, output, stats);
        if (oracle_cmd->parsed()) return run_oracle(input, format, alphabet, oracle_tau);
        if (bench_cmd->parsed())
            return run_bench(bench_n, bench_ell, bench_sigma, bench_eps, bench_beta, bench_seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
