#include "seqmine/occurrence.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>

namespace seqmine {

namespace {

// Node budget for the exact branch and bound, and a cap on how many
// occurrences get enumerated before it runs. Hitting either returns the
// best count found so far (at least the greedy bound).
constexpr std::uint64_t kSearchBudget = 1u << 20;
constexpr std::size_t kEnumCap = 1u << 18;

using Emb = std::vector<std::uint32_t>;

struct Problem {
    const Sequence& seq;
    std::size_t n, m;
    std::size_t gap, window;                       // effective (capped at n)
    std::vector<std::vector<std::uint32_t>> match;  // per element, ascending
};

// Smallest-end, then lexicographically smallest occurrence avoiding used
// positions. Feasibility per end is computed backward from the end
// position, then the body is rebuilt forward picking minimal positions.
std::optional<Emb> min_end_embedding(const Problem& pb, const std::vector<char>& used) {
    const std::size_t m = pb.m;
    std::vector<std::vector<std::uint32_t>> feas(m);
    for (std::uint32_t e : pb.match[m - 1]) {
        if (used[e]) continue;
        for (auto& f : feas) f.clear();
        feas[m - 1].push_back(e);
        bool dead = false;
        for (std::size_t j = m - 1; j-- > 0;) {
            const auto& nxt = feas[j + 1];
            for (std::uint32_t p : pb.match[j]) {
                if (p >= e || used[p]) continue;
                if (j == 0 && e - p > pb.window) continue;
                // needs a successor in (p, p + gap]
                auto it = std::upper_bound(nxt.begin(), nxt.end(), p);
                if (it != nxt.end() && *it <= p + pb.gap) feas[j].push_back(p);
            }
            if (feas[j].empty()) {
                dead = true;
                break;
            }
        }
        if (dead) continue;
        Emb emb(m);
        emb[0] = feas[0].front();
        for (std::size_t j = 1; j + 1 < m; ++j) {
            const auto& lvl = feas[j];
            // feasibility of emb[j-1] guarantees a successor within the gap
            auto it = std::upper_bound(lvl.begin(), lvl.end(), emb[j - 1]);
            emb[j] = *it;
        }
        emb[m - 1] = e;
        return emb;
    }
    return std::nullopt;
}

void enumerate_embeddings(const Problem& pb, std::size_t j, Emb& prefix,
                          std::vector<Emb>& out, bool& truncated) {
    if (truncated) return;
    if (j == pb.m) {
        if (out.size() >= kEnumCap) {
            truncated = true;
            return;
        }
        out.push_back(prefix);
        return;
    }
    for (std::uint32_t p : pb.match[j]) {
        if (j > 0) {
            std::uint32_t prev = prefix[j - 1];
            if (p <= prev) continue;
            if (p - prev > pb.gap) break;  // match list ascending
        }
        if (j == pb.m - 1 && p - prefix[0] > pb.window) break;
        prefix[j] = p;
        enumerate_embeddings(pb, j + 1, prefix, out, truncated);
        if (truncated) return;
    }
}

struct Search {
    const Problem& pb;
    const std::vector<std::uint32_t>& ends;
    const std::vector<std::vector<const Emb*>>& by_end;
    std::vector<char> used;
    std::uint32_t best;
    std::uint64_t nodes = 0;

    std::uint32_t bound() const {
        std::size_t b = kEnumCap;
        for (const auto& ml : pb.match) {
            std::size_t free = 0;
            for (std::uint32_t p : ml) free += !used[p];
            b = std::min(b, free);
        }
        return static_cast<std::uint32_t>(b);
    }

    void run(std::size_t ei, std::uint32_t cnt) {
        if (++nodes > kSearchBudget) return;
        if (cnt > best) best = cnt;
        if (ei == ends.size()) return;
        if (cnt + bound() <= best) return;
        for (const Emb* emb : by_end[ei]) {
            bool clash = false;
            for (std::uint32_t p : *emb)
                if (used[p]) {
                    clash = true;
                    break;
                }
            if (clash) continue;
            for (std::uint32_t p : *emb) used[p] = 1;
            run(ei + 1, cnt + 1);
            for (std::uint32_t p : *emb) used[p] = 0;
            if (nodes > kSearchBudget) return;
        }
        run(ei + 1, cnt);
    }
};

}  // namespace

std::uint32_t count_instances(const Sequence& seq, const Pattern& pat, const Constraints& c) {
    if (pat.empty()) throw std::invalid_argument("count_instances: empty pattern");
    const std::size_t n = seq.length();
    const std::size_t m = pat.size();
    if (m > n) return 0;

    Problem pb{seq, n, m,
               std::min(c.max_gap, n),
               std::min(c.max_window, n),
               {}};
    pb.match.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < n; ++k)
            if (seq.itemsets[k].contains(pat.itemsets[j]))
                pb.match[j].push_back(static_cast<std::uint32_t>(k));
        if (pb.match[j].empty()) return 0;
    }
    if (m == 1) return static_cast<std::uint32_t>(pb.match[0].size());

    std::uint32_t upper = static_cast<std::uint32_t>(pb.match[0].size());
    for (const auto& ml : pb.match)
        upper = std::min(upper, static_cast<std::uint32_t>(ml.size()));

    // greedy lower bound: repeatedly take the occurrence with the
    // smallest end position, smallest body
    std::vector<char> used(n, 0);
    std::uint32_t lower = 0;
    while (auto emb = min_end_embedding(pb, used)) {
        for (std::uint32_t p : *emb) used[p] = 1;
        ++lower;
    }
    if (lower == upper) return lower;
    if (lower == 0) return 0;  // no occurrence at all

    // exact phase: at most one occurrence can end at any given position,
    // so branch over end positions in ascending order
    std::vector<Emb> embs;
    Emb prefix(m);
    bool truncated = false;
    enumerate_embeddings(pb, 0, prefix, embs, truncated);
    if (truncated) return lower;

    std::map<std::uint32_t, std::vector<const Emb*>> grouped;
    for (const auto& emb : embs) grouped[emb.back()].push_back(&emb);
    std::vector<std::uint32_t> ends;
    std::vector<std::vector<const Emb*>> by_end;
    ends.reserve(grouped.size());
    by_end.reserve(grouped.size());
    for (auto& [e, list] : grouped) {
        ends.push_back(e);
        by_end.push_back(std::move(list));
    }

    Search s{pb, ends, by_end, std::vector<char>(n, 0), lower};
    s.run(0, 0);
    return s.best;
}

std::vector<std::vector<std::uint32_t>> instance_matrix(const SequenceDatabase& db,
                                                        const std::vector<Pattern>& patterns,
                                                        const Constraints& c) {
    if (db.empty()) throw EmptyDatabase();
    const std::size_t rows = db.size();
    const std::size_t cols = patterns.size();
    std::vector<std::vector<std::uint32_t>> mat(rows, std::vector<std::uint32_t>(cols, 0));
    const auto cells = static_cast<std::int64_t>(rows * cols);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t cell = 0; cell < cells; ++cell) {
        auto r = static_cast<std::size_t>(cell) / cols;
        auto p = static_cast<std::size_t>(cell) % cols;
        mat[r][p] = count_instances(db.sequences[r], patterns[p], c);
    }
    return mat;
}

}  // namespace seqmine
