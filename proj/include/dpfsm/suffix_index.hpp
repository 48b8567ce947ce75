#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <new>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#if defined(__linux__)
#include <sys/mman.h>
#endif

#include "dpfsm/base.hpp"
#include "dpfsm/codec.hpp"

namespace dpfsm {

// Position in the index: offset == 0 is at `node`; offset >= 1 is that many
// symbols consumed into the incoming edge of `node` (0 <= offset < edge
// length). Frequency anywhere inside an edge equals the lower node's count.
struct Locus {
    std::int32_t node = 0;
    std::int32_t offset = 0;
    std::int64_t depth = 0;

    friend bool operator==(const Locus& a, const Locus& b) {
        return a.node == b.node && a.offset == b.offset;
    }
};

namespace detail {

// Anonymous mapping with a best-effort huge-page hint. The suffix-tree hash
// and node array are random-access over hundreds of megabytes; 2 MiB pages
// keep the page walks off the critical path where the kernel allows it.
template <class T>
class HugeArray {
public:
    HugeArray() = default;
    explicit HugeArray(std::size_t count) { reset(count); }
    HugeArray(const HugeArray&) = delete;
    HugeArray& operator=(const HugeArray&) = delete;
    HugeArray(HugeArray&& other) noexcept { swap(other); }
    HugeArray& operator=(HugeArray&& other) noexcept {
        swap(other);
        return *this;
    }
    ~HugeArray() { release(); }

    void reset(std::size_t count) {
        release();
        if (count == 0) return;
        bytes_ = ((count * sizeof(T) + kHuge - 1) / kHuge) * kHuge;
#if defined(__linux__)
        void* p = mmap(nullptr, bytes_, PROT_READ | PROT_WRITE,
                       MAP_PRIVATE | MAP_ANONYMOUS, -1, 0);
        if (p == MAP_FAILED) throw std::bad_alloc();
        madvise(p, bytes_, MADV_HUGEPAGE);  // advisory only
        data_ = static_cast<T*>(p);
#else
        data_ = static_cast<T*>(::operator new(bytes_));
#endif
        count_ = count;
    }

    void release() {
#if defined(__linux__)
        if (data_) munmap(data_, bytes_);
#else
        if (data_) ::operator delete(data_);
#endif
        data_ = nullptr;
        count_ = 0;
        bytes_ = 0;
    }

    T* data() { return data_; }
    const T* data() const { return data_; }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }
    std::size_t size() const { return count_; }
    bool empty() const { return count_ == 0; }

private:
    static constexpr std::size_t kHuge = 2u << 20;
    void swap(HugeArray& other) noexcept {
        std::swap(data_, other.data_);
        std::swap(count_, other.count_);
        std::swap(bytes_, other.bytes_);
    }
    T* data_ = nullptr;
    std::size_t count_ = 0;
    std::size_t bytes_ = 0;
};

// Open-addressing map for suffix-tree transitions, keyed by (node, symbol).
// Key and value share a slot so a probe touches one cache line.
class TransitionMap {
public:
    explicit TransitionMap(std::size_t expected) {
        std::size_t slots = 16;
        while (slots * 2 < expected * 3) slots <<= 1;
        slots_.reset(slots);
        for (std::size_t i = 0; i < slots; ++i) slots_[i] = Slot{kEmpty, -1};
        mask_ = slots - 1;
    }

    std::int32_t get(std::uint64_t key) const {
        for (std::size_t i = index(key);; i = (i + 1) & mask_) {
            if (slots_[i].key == key) return slots_[i].val;
            if (slots_[i].key == kEmpty) return -1;
        }
    }

    void put(std::uint64_t key, std::int32_t val) {
        if ((size_ + 1) * 3 > slots_.size() * 2) grow();
        for (std::size_t i = index(key);; i = (i + 1) & mask_) {
            if (slots_[i].key == key) {
                slots_[i].val = val;
                return;
            }
            if (slots_[i].key == kEmpty) {
                slots_[i] = {key, val};
                ++size_;
                return;
            }
        }
    }

    void clear_and_free() { slots_.release(); }

private:
    struct Slot {
        std::uint64_t key;
        std::int32_t val;
    };
    static constexpr std::uint64_t kEmpty = ~0ull;

    std::size_t index(std::uint64_t key) const {
        std::uint64_t z = key + 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return static_cast<std::size_t>(z ^ (z >> 31)) & mask_;
    }

    void grow() {
        HugeArray<Slot> old = std::move(slots_);
        slots_.reset(old.size() * 2);
        for (std::size_t i = 0; i < slots_.size(); ++i) slots_[i] = Slot{kEmpty, -1};
        mask_ = slots_.size() - 1;
        size_ = 0;
        for (std::size_t i = 0; i < old.size(); ++i)
            if (old[i].key != kEmpty) put(old[i].key, old[i].val);
    }

    HugeArray<Slot> slots_;
    std::size_t mask_ = 0;
    std::size_t size_ = 0;
};

}  // namespace detail

// Frequency-annotated r-spaced sparse suffix tree over the concatenation
// S_1 #_1^r S_2 #_2^r ... S_n #_n^r. Construction interns each r-block as a
// meta-character, builds the suffix tree of the meta string online, then
// refines every child set into a bit-level path-compressed trie so the miner
// can reveal one symbol (and its frequency) at a time. Immutable after build.
class SuffixIndex {
public:
    static SuffixIndex build(std::span<const EncodedString> strings, int round) {
        if (round < 1) throw std::invalid_argument("suffix index: round must be >= 1");
        SuffixIndex idx;
        idx.round_ = round;
        const auto r = static_cast<std::size_t>(round);

        std::size_t total = 0;
        for (const auto& s : strings) {
            if (s.symbols.size() % r != 0)
                throw std::invalid_argument("suffix index: string length " +
                                            std::to_string(s.symbols.size()) +
                                            " is not a multiple of round " + std::to_string(round));
            total += s.symbols.size() + r;
        }
        idx.text_.reserve(total);
        for (std::size_t i = 0; i < strings.size(); ++i) {
            for (EncSym sym : strings[i].symbols)
                if (is_delimiter(sym))
                    throw std::invalid_argument("suffix index: input strings must be delimiter-free");
            idx.text_ += strings[i].symbols;
            idx.text_.append(r, kDelimBase + static_cast<EncSym>(i));
        }
        idx.build_tree();
        return idx;
    }

    int round() const { return round_; }
    const EncString& text() const { return text_; }
    std::int64_t node_count() const { return static_cast<std::int64_t>(parent_.size()); }
    std::int64_t suffix_count() const { return suffixes_; }

    Locus root_locus() const { return Locus{0, 0, 0}; }

    // Node accessors (node 0 is the root and has no incoming edge).
    std::int32_t parent(std::int32_t v) const { return parent_[v]; }
    std::int32_t first_child(std::int32_t v) const { return first_child_[v]; }
    std::int32_t next_sibling(std::int32_t v) const { return next_sibling_[v]; }
    bool is_leaf(std::int32_t v) const { return first_child_[v] == -1; }
    std::int64_t edge_start(std::int32_t v) const { return edge_start_[v]; }
    std::int64_t edge_length(std::int32_t v) const { return edge_end_[v] - edge_start_[v]; }
    std::int64_t string_depth(std::int32_t v) const { return depth_[v]; }
    std::int64_t subtree_leaves(std::int32_t v) const { return count_[v]; }
    EncSym first_symbol(std::int32_t v) const { return text_[static_cast<std::size_t>(edge_start_[v])]; }

    std::int64_t freq_at(const Locus& loc) const { return count_[loc.node]; }

    // Symbol continuing from a mid-edge locus; nullopt when at a node.
    std::optional<EncSym> symbol_after(const Locus& loc) const {
        if (loc.offset == 0) return std::nullopt;
        return text_[static_cast<std::size_t>(edge_start_[loc.node] + loc.offset)];
    }

    // One-symbol advance; constant time. Delimiters are never traversed.
    std::optional<Locus> step(const Locus& loc, EncSym sym) const {
        if (is_delimiter(sym)) return std::nullopt;
        if (loc.offset == 0) {
            for (std::int32_t c = first_child_[loc.node]; c != -1; c = next_sibling_[c]) {
                EncSym fs = first_symbol(c);
                if (fs == sym)
                    return Locus{c, edge_length(c) == 1 ? 0 : 1, loc.depth + 1};
                if (fs > sym) break;  // sibling chains are sorted by first symbol
            }
            return std::nullopt;
        }
        if (text_[static_cast<std::size_t>(edge_start_[loc.node] + loc.offset)] != sym)
            return std::nullopt;
        std::int32_t off = loc.offset + 1;
        if (off == edge_length(loc.node)) off = 0;
        return Locus{loc.node, off, loc.depth + 1};
    }

    std::optional<Locus> locus_of(const EncString& pattern) const {
        Locus loc = root_locus();
        for (EncSym sym : pattern) {
            auto next = step(loc, sym);
            if (!next) return std::nullopt;
            loc = *next;
        }
        return loc;
    }

    // Deterministic indented rendering for golden tests.
    std::string dump(std::size_t max_label = 12) const {
        std::string out;
        struct Frame {
            std::int32_t node;
            int level;
        };
        std::vector<Frame> stack{{0, 0}};
        while (!stack.empty()) {
            Frame f = stack.back();
            stack.pop_back();
            out.append(static_cast<std::size_t>(f.level) * 2, ' ');
            if (f.node == 0) {
                out += "[root]";
            } else {
                out += '[';
                EncString label = text_.substr(static_cast<std::size_t>(edge_start_[f.node]),
                                               static_cast<std::size_t>(edge_length(f.node)));
                out += render_enc(label, max_label);
                out += ']';
            }
            out += " depth=" + std::to_string(depth_[f.node]) +
                   " count=" + std::to_string(count_[f.node]) + "\n";
            std::vector<std::int32_t> kids;
            for (std::int32_t c = first_child_[f.node]; c != -1; c = next_sibling_[c])
                kids.push_back(c);
            for (auto it = kids.rbegin(); it != kids.rend(); ++it)
                stack.push_back({*it, f.level + 1});
        }
        return out;
    }

private:
    SuffixIndex() = default;

    std::int32_t new_node(std::int64_t es, std::int64_t ee, std::int32_t parent) {
        auto id = static_cast<std::int32_t>(parent_.size());
        parent_.push_back(parent);
        edge_start_.push_back(static_cast<std::int32_t>(es));
        edge_end_.push_back(static_cast<std::int32_t>(ee));
        depth_.push_back(parent < 0 ? 0 : depth_[parent] + static_cast<std::int32_t>(ee - es));
        first_child_.push_back(-1);
        next_sibling_.push_back(-1);
        last_child_.push_back(-1);
        if (parent >= 0) {
            if (first_child_[parent] == -1)
                first_child_[parent] = id;
            else
                next_sibling_[last_child_[parent]] = id;
            last_child_[parent] = id;
        }
        return id;
    }

    void build_tree();

    EncString text_;
    int round_ = 1;
    std::int64_t suffixes_ = 0;

    std::vector<std::int32_t> parent_, first_child_, next_sibling_;
    std::vector<std::int32_t> edge_start_, edge_end_, depth_;
    std::vector<std::int64_t> count_;
    std::vector<std::int32_t> last_child_;  // build scratch, freed afterwards
};

inline void SuffixIndex::build_tree() {
    const auto r = static_cast<std::size_t>(round_);
    const std::size_t m_len = text_.size() / r;
    suffixes_ = static_cast<std::int64_t>(m_len);

    // build-phase tracing for performance work
    const bool trace = std::getenv("DPFSM_BUILD_TRACE") != nullptr;
    auto trace_t0 = std::chrono::steady_clock::now();
    auto mark = [&](const char* what) {
        if (!trace) return;
        auto now = std::chrono::steady_clock::now();
        std::fprintf(stderr, "  build %-12s %7.1f ms\n", what,
                     std::chrono::duration<double, std::milli>(now - trace_t0).count());
        trace_t0 = now;
    };

    // Intern r-blocks as meta-characters, ids in first-occurrence order.
    std::vector<std::uint32_t> meta(m_len);
    std::uint32_t distinct_blocks = 0;
    {
        std::unordered_map<std::u32string_view, std::uint32_t> pool;
        for (std::size_t j = 0; j < m_len; ++j) {
            std::u32string_view block(text_.data() + j * r, r);
            auto [it, fresh] = pool.emplace(block, static_cast<std::uint32_t>(pool.size()));
            meta[j] = it->second;
        }
        distinct_blocks = static_cast<std::uint32_t>(pool.size());
    }
    mark("intern");

    // Ukkonen's online construction over the meta string. The final
    // delimiter block is unique, so every suffix ends at an explicit leaf.
    struct MetaNode {
        std::int32_t l;
        std::int32_t r;  // -1 while the leaf is still open
        std::int32_t parent;
        std::int32_t link;
    };
    detail::HugeArray<MetaNode> nd(2 * m_len + 2);  // 1 leaf + at most 1 split per extension
    std::size_t nd_size = 0;
    nd[nd_size++] = {0, 0, -1, -1};  // root
    detail::TransitionMap ch(2 * m_len + 16);
    // the root's fanout is the whole meta alphabet; a flat array keeps its
    // transitions (the hottest ones) out of the hash
    std::vector<std::int32_t> root_child(distinct_blocks, -1);
    auto key = [](std::int32_t node, std::uint32_t c) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(node)) << 32) | c;
    };
    auto get_child = [&](std::int32_t node, std::uint32_t c) {
        return node == 0 ? root_child[c] : ch.get(key(node, c));
    };
    auto set_child = [&](std::int32_t node, std::uint32_t c, std::int32_t v) {
        if (node == 0)
            root_child[c] = v;
        else
            ch.put(key(node, c), v);
    };

    std::int32_t active_node = 0;
    std::int64_t active_edge = 0, active_len = 0, remainder = 0;
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(m_len); ++i) {
        std::int32_t pending = -1;
        auto add_link = [&](std::int32_t v) {
            if (pending != -1) nd[pending].link = v;
            pending = v;
        };
        ++remainder;
        while (remainder > 0) {
            if (active_len == 0) active_edge = i;
            std::int32_t nxt = get_child(active_node, meta[active_edge]);
            if (nxt == -1) {
                auto leaf = static_cast<std::int32_t>(nd_size);
                nd[nd_size++] = {static_cast<std::int32_t>(i), -1, active_node, -1};
                set_child(active_node, meta[i], leaf);
                add_link(active_node);
            } else {
                std::int64_t elen =
                    (nd[nxt].r == -1 ? i + 1 : nd[nxt].r) - static_cast<std::int64_t>(nd[nxt].l);
                if (active_len >= elen) {
                    active_node = nxt;
                    active_edge += elen;
                    active_len -= elen;
                    continue;
                }
                if (meta[nd[nxt].l + active_len] == meta[i]) {
                    ++active_len;
                    add_link(active_node);
                    break;
                }
                auto split = static_cast<std::int32_t>(nd_size);
                nd[nd_size++] = {nd[nxt].l, static_cast<std::int32_t>(nd[nxt].l + active_len),
                                 active_node, -1};
                set_child(active_node, meta[active_edge], split);
                auto leaf = static_cast<std::int32_t>(nd_size);
                nd[nd_size++] = {static_cast<std::int32_t>(i), -1, split, -1};
                set_child(split, meta[i], leaf);
                nd[nxt].l += static_cast<std::int32_t>(active_len);
                nd[nxt].parent = split;
                set_child(split, meta[nd[nxt].l], nxt);
                add_link(split);
            }
            --remainder;
            if (active_node == 0 && active_len > 0) {
                --active_len;
                active_edge = i - remainder + 1;
            } else if (active_node != 0) {
                active_node = nd[active_node].link != -1 ? nd[active_node].link : 0;
            }
        }
    }
    if (remainder != 0)
        throw std::logic_error("suffix index: construction left implicit suffixes");
    mark("ukkonen");
    ch.clear_and_free();
    std::vector<std::int32_t>().swap(root_child);
    for (std::size_t v = 0; v < nd_size; ++v)
        if (nd[v].r == -1) nd[v].r = static_cast<std::int32_t>(m_len);

    // Children of each meta node, sorted by the content of the first block.
    const std::size_t nm = nd_size;
    std::vector<std::int32_t> order;
    std::vector<std::int32_t> group_begin(nm + 1, 0);
    {
        std::vector<std::int32_t> deg(nm, 0);
        for (std::size_t v = 1; v < nm; ++v) ++deg[static_cast<std::size_t>(nd[v].parent)];
        for (std::size_t v = 0; v < nm; ++v) group_begin[v + 1] = group_begin[v] + deg[v];
        order.resize(nm - 1);
        std::vector<std::int32_t> cursor(group_begin.begin(), group_begin.end() - 1);
        for (std::size_t v = 1; v < nm; ++v)
            order[static_cast<std::size_t>(cursor[static_cast<std::size_t>(nd[v].parent)]++)] =
                static_cast<std::int32_t>(v);
        auto block_view = [&](std::int32_t v) {
            return std::u32string_view(text_.data() + static_cast<std::size_t>(nd[v].l) * r, r);
        };
        for (std::size_t v = 0; v < nm; ++v)
            std::sort(order.begin() + group_begin[v], order.begin() + group_begin[v + 1],
                      [&](std::int32_t a, std::int32_t b) { return block_view(a) < block_view(b); });
    }
    mark("group+sort");

    // Bit-level refinement: regroup each child set by symbol prefixes of the
    // first block, adding explicit nodes at within-block divergence points.
    const std::size_t expected = nm + nm / 2 + 8;
    parent_.reserve(expected);
    edge_start_.reserve(expected);
    edge_end_.reserve(expected);
    depth_.reserve(expected);
    first_child_.reserve(expected);
    next_sibling_.reserve(expected);
    last_child_.reserve(expected);
    new_node(0, 0, -1);  // refined root

    auto sym_l = [&](std::int32_t v) { return nd[v].l * static_cast<std::int64_t>(r); };
    auto sym_r = [&](std::int32_t v) { return nd[v].r * static_cast<std::int64_t>(r); };
    auto block_sym = [&](std::int32_t v, std::int64_t q) {
        return text_[static_cast<std::size_t>(sym_l(v) + q)];
    };

    struct Frame {
        std::int32_t final_parent;
        std::int32_t b, e;  // run of meta children in `scratch`
        std::int32_t p;     // symbols of the first block already consumed
    };
    std::vector<std::int32_t> scratch;
    scratch.reserve(nm);
    std::vector<Frame> work;
    auto push_group = [&](std::int32_t meta_node, std::int32_t final_id) {
        std::int32_t b = static_cast<std::int32_t>(scratch.size());
        for (std::int32_t j = group_begin[meta_node]; j < group_begin[meta_node + 1]; ++j)
            scratch.push_back(order[static_cast<std::size_t>(j)]);
        if (scratch.size() > static_cast<std::size_t>(b))
            work.push_back({final_id, b, static_cast<std::int32_t>(scratch.size()), 0});
    };
    push_group(0, 0);

    while (!work.empty()) {
        Frame f = work.back();
        work.pop_back();
        if (f.e - f.b == 1) {
            std::int32_t c = scratch[static_cast<std::size_t>(f.b)];
            std::int32_t fc = new_node(sym_l(c) + f.p, sym_r(c), f.final_parent);
            push_group(c, fc);
            continue;
        }
        // First position >= p where the runs' first blocks diverge; sibling
        // blocks are distinct, so this stays within the block.
        std::int64_t p2 = f.p;
        for (;; ++p2) {
            if (p2 >= static_cast<std::int64_t>(r))
                throw std::logic_error("suffix index: sibling blocks not distinct");
            EncSym s0 = block_sym(scratch[static_cast<std::size_t>(f.b)], p2);
            bool same = true;
            for (std::int32_t j = f.b + 1; j < f.e && same; ++j)
                same = block_sym(scratch[static_cast<std::size_t>(j)], p2) == s0;
            if (!same) break;
        }
        std::int32_t base = f.final_parent;
        if (p2 > f.p) {
            std::int32_t rep = scratch[static_cast<std::size_t>(f.b)];
            base = new_node(sym_l(rep) + f.p, sym_l(rep) + p2, f.final_parent);
        }
        // Partition by the symbol at p2; push runs in reverse so they are
        // processed (and chained) in ascending symbol order.
        std::vector<std::pair<std::int32_t, std::int32_t>> runs;
        std::int32_t j = f.b;
        while (j < f.e) {
            EncSym s0 = block_sym(scratch[static_cast<std::size_t>(j)], p2);
            std::int32_t j2 = j + 1;
            while (j2 < f.e && block_sym(scratch[static_cast<std::size_t>(j2)], p2) == s0) ++j2;
            runs.emplace_back(j, j2);
            j = j2;
        }
        for (auto it = runs.rbegin(); it != runs.rend(); ++it)
            work.push_back({base, it->first, it->second, static_cast<std::int32_t>(p2)});
    }

    std::vector<std::int32_t>().swap(last_child_);
    mark("refine");

    // Leaf counts, bottom-up; nodes are created parents-first.
    count_.assign(parent_.size(), 0);
    for (std::size_t v = parent_.size(); v-- > 1;) {
        if (first_child_[v] == -1) count_[v] = 1;
        count_[static_cast<std::size_t>(parent_[v])] += count_[v];
    }
    if (!count_.empty() && parent_.size() > 1) {
        // root count is the number of r-spaced suffixes
        if (count_[0] != suffixes_)
            throw std::logic_error("suffix index: leaf count does not match suffix count");
    }
    mark("counts");
}

}  // namespace dpfsm
