#include "seqmine/mine.hpp"

#include <algorithm>
#include <cstdint>
#include <map>

#include "seqmine/occurrence.hpp"

namespace seqmine {

namespace {

// Per supporting sequence, the ends of the pattern's occurrences paired
// with the largest embedding start achieving that end. Tracking the
// maximal start keeps the list a complete summary under the window
// bound: once end - start exceeds the window for the best start, no
// embedding with that end (or any extension of one) can ever satisfy it,
// so the entry is dropped eagerly.
struct SeqOcc {
    std::uint32_t seq;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;  // (end, max start), ends ascending
};

using OccList = std::vector<SeqOcc>;

struct Miner {
    const SequenceDatabase& db;
    const Constraints& c;
    std::size_t threshold;

    void emit(std::vector<PatternStats>& out, const std::vector<Itemset>& pat,
              const OccList& occ) const {
        PatternStats ps;
        ps.pattern = Pattern(pat);
        ps.supporting.reserve(occ.size());
        for (const auto& so : occ) ps.supporting.push_back(so.seq);
        ps.support_count = occ.size();
        ps.f_support = static_cast<double>(occ.size()) / static_cast<double>(db.size());
        out.push_back(std::move(ps));
    }

    void dfs(std::vector<PatternStats>& out, std::vector<Itemset>& pat,
             std::size_t item_count, const OccList& occ) const {
        if (item_count >= c.min_items) emit(out, pat, occ);
        if (item_count == c.max_items) return;

        std::map<ItemId, OccList> seq_ext;
        std::map<ItemId, OccList> set_ext;
        const ItemId last_max = pat.back().max_item();

        for (const auto& so : occ) {
            const Sequence& s = db.sequences[so.seq];
            const std::size_t n = s.length();
            std::map<ItemId, std::map<std::uint32_t, std::uint32_t>> loc_seq;
            std::map<ItemId, std::map<std::uint32_t, std::uint32_t>> loc_set;
            for (const auto& [end, start] : so.entries) {
                std::size_t hi = c.max_gap >= n ? n - 1 : std::min(n - 1, end + c.max_gap);
                for (std::size_t e2 = end + 1; e2 <= hi; ++e2) {
                    for (ItemId x : s.itemsets[e2].items) {
                        auto& slot = loc_seq[x][static_cast<std::uint32_t>(e2)];
                        slot = std::max(slot, start);
                    }
                }
                for (ItemId x : s.itemsets[end].items)
                    if (x > last_max) loc_set[x][end] = start;
            }
            for (auto& [x, ends] : loc_seq) {
                SeqOcc ext{so.seq, {}};
                for (auto& [e2, st] : ends)
                    if (c.max_window == kUnlimited || e2 - st <= c.max_window)
                        ext.entries.emplace_back(e2, st);
                if (!ext.entries.empty()) seq_ext[x].push_back(std::move(ext));
            }
            for (auto& [x, ends] : loc_set) {
                SeqOcc ext{so.seq, {}};
                ext.entries.assign(ends.begin(), ends.end());
                set_ext[x].push_back(std::move(ext));
            }
        }

        for (auto& [x, list] : set_ext) {
            if (list.size() < threshold) continue;
            pat.back().items.push_back(x);
            dfs(out, pat, item_count + 1, list);
            pat.back().items.pop_back();
        }
        for (auto& [x, list] : seq_ext) {
            if (list.size() < threshold) continue;
            pat.push_back(Itemset{x});
            dfs(out, pat, item_count + 1, list);
            pat.pop_back();
        }
    }
};

void fill_instance_totals(const SequenceDatabase& db, const Constraints& c,
                          std::vector<PatternStats>& results) {
    const auto total = static_cast<std::int64_t>(results.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < total; ++i) {
        auto& ps = results[static_cast<std::size_t>(i)];
        std::uint64_t sum = 0;
        for (std::uint32_t s : ps.supporting)
            sum += count_instances(db.sequences[s], ps.pattern, c);
        ps.i_support_total = sum;
    }
}

}  // namespace

std::vector<PatternStats> mine(const SequenceDatabase& db, const Constraints& c) {
    if (db.empty()) throw EmptyDatabase();
    c.validate();
    const std::size_t threshold = c.support_threshold(db.size());

    // root occurrence lists, one per alphabet item
    std::vector<OccList> roots(db.alphabet.size());
    for (std::size_t si = 0; si < db.size(); ++si) {
        const Sequence& s = db.sequences[si];
        std::map<ItemId, SeqOcc> local;
        for (std::size_t k = 0; k < s.length(); ++k) {
            for (ItemId x : s.itemsets[k].items) {
                auto it = local.try_emplace(x, SeqOcc{static_cast<std::uint32_t>(si), {}}).first;
                it->second.entries.emplace_back(static_cast<std::uint32_t>(k),
                                                static_cast<std::uint32_t>(k));
            }
        }
        for (auto& [x, so] : local) roots[x].push_back(std::move(so));
    }

    Miner miner{db, c, threshold};
    std::vector<std::vector<PatternStats>> by_root(roots.size());
    const auto nroots = static_cast<std::int64_t>(roots.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < nroots; ++r) {
        auto x = static_cast<std::size_t>(r);
        if (roots[x].size() < threshold) continue;
        std::vector<Itemset> pat{Itemset{static_cast<ItemId>(x)}};
        miner.dfs(by_root[x], pat, 1, roots[x]);
    }

    std::vector<PatternStats> results;
    for (auto& chunk : by_root)
        for (auto& ps : chunk) results.push_back(std::move(ps));
    fill_instance_totals(db, c, results);
    sort_canonical(results, db.alphabet);
    return results;
}

std::vector<PatternStats> mine_bruteforce(const SequenceDatabase& db, const Constraints& c) {
    if (db.empty()) throw EmptyDatabase();
    c.validate();

    std::size_t total_items = 0;
    for (const auto& s : db.sequences)
        for (const auto& is : s.itemsets) total_items += is.size();
    if (total_items > 64 || db.alphabet.size() > 8)
        throw InstanceTooLarge("mine_bruteforce caps at 64 total items and 8 alphabet symbols");

    const std::size_t threshold = c.support_threshold(db.size());
    std::vector<PatternStats> results;

    std::vector<Itemset> pat;
    auto grow = [&](auto&& self, std::size_t item_count) -> void {
        Pattern p(pat);
        std::vector<std::uint32_t> supp;
        for (std::size_t si = 0; si < db.size(); ++si)
            if (contains(db.sequences[si], p, c)) supp.push_back(static_cast<std::uint32_t>(si));
        if (supp.empty()) return;

        if (supp.size() >= threshold && item_count >= c.min_items) {
            PatternStats ps;
            ps.pattern = p;
            ps.support_count = supp.size();
            ps.f_support = static_cast<double>(supp.size()) / static_cast<double>(db.size());
            std::uint64_t sum = 0;
            for (std::uint32_t s : supp) sum += count_instances(db.sequences[s], p, c);
            ps.i_support_total = sum;
            ps.supporting = std::move(supp);
            results.push_back(std::move(ps));
        }
        if (item_count == c.max_items) return;

        const auto alpha = static_cast<ItemId>(db.alphabet.size());
        for (ItemId x = pat.back().max_item() + 1; x < alpha; ++x) {
            pat.back().items.push_back(x);
            self(self, item_count + 1);
            pat.back().items.pop_back();
        }
        for (ItemId x = 0; x < alpha; ++x) {
            pat.push_back(Itemset{x});
            self(self, item_count + 1);
            pat.pop_back();
        }
    };

    for (ItemId x = 0; x < static_cast<ItemId>(db.alphabet.size()); ++x) {
        pat.assign(1, Itemset{x});
        grow(grow, 1);
    }
    sort_canonical(results, db.alphabet);
    return results;
}

}  // namespace seqmine
