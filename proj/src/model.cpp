#include "seqmine/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace seqmine {

ItemId Alphabet::intern(std::string_view label) {
    auto it = ids_.find(std::string(label));
    if (it != ids_.end()) return it->second;
    ItemId id = static_cast<ItemId>(labels_.size());
    labels_.emplace_back(label);
    ids_.emplace(labels_.back(), id);
    return id;
}

std::optional<ItemId> Alphabet::find(std::string_view label) const {
    auto it = ids_.find(std::string(label));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

const std::string& Alphabet::label(ItemId id) const {
    if (id >= labels_.size()) throw UnknownItemId(id);
    return labels_[id];
}

Itemset::Itemset(std::vector<ItemId> ids) : items(std::move(ids)) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
}

Itemset::Itemset(std::initializer_list<ItemId> ids) : Itemset(std::vector<ItemId>(ids)) {}

bool Itemset::has(ItemId id) const {
    return std::binary_search(items.begin(), items.end(), id);
}

bool Itemset::contains(const Itemset& sub) const {
    return std::includes(items.begin(), items.end(), sub.items.begin(), sub.items.end());
}

std::optional<double> EventMeta::attribute(std::string_view name) const {
    if (name == "duration") return duration;
    auto it = numeric.find(name);
    if (it == numeric.end()) return std::nullopt;
    return it->second;
}

const EventMeta* Sequence::meta_at(std::size_t pos) const {
    if (meta.empty()) return nullptr;
    return &meta.at(pos);
}

std::size_t Pattern::item_count() const {
    std::size_t total = 0;
    for (const auto& e : itemsets) total += e.size();
    return total;
}

void Constraints::validate() const {
    if (min_support && min_count)
        throw InvalidConstraints("min_support and min_count are mutually exclusive");
    if (min_support && !(*min_support > 0.0 && *min_support <= 1.0))
        throw InvalidConstraints("min_support must lie in (0, 1]");
    if (min_count && *min_count < 1)
        throw InvalidConstraints("min_count must be at least 1");
    if (max_gap < 1)
        throw InvalidConstraints("max_gap must be at least 1");
    if (min_items < 1)
        throw InvalidConstraints("min_items must be at least 1");
    if (max_items < min_items)
        throw InvalidConstraints("max_items must be at least min_items");
}

std::size_t Constraints::support_threshold(std::size_t db_size) const {
    std::size_t t = 1;
    if (min_count) t = std::max(t, *min_count);
    if (min_support) {
        double raw = *min_support * static_cast<double>(db_size);
        auto c = static_cast<std::size_t>(std::ceil(raw - 1e-9));
        t = std::max(t, std::max<std::size_t>(c, 1));
    }
    return t;
}

bool contains(const Sequence& seq, const Pattern& pat, const Constraints& c) {
    if (pat.empty()) throw std::invalid_argument("contains: empty pattern");
    const std::size_t m = pat.size();
    const std::size_t n = seq.length();
    if (m > n) return false;

    const std::size_t g = c.max_gap;
    const std::size_t w = c.max_window;

    // best[k] = largest start position over embeddings of the pattern
    // prefix whose last element sits at position k, or -1 when none.
    // Tracking the maximum start is what makes the final window check
    // sufficient: if the best start for some end violates the window,
    // every other embedding with that end does too.
    std::vector<std::int64_t> best(n, -1), next(n, -1);
    for (std::size_t k = 0; k < n; ++k)
        if (seq.itemsets[k].contains(pat.itemsets[0])) best[k] = static_cast<std::int64_t>(k);

    for (std::size_t j = 1; j < m; ++j) {
        std::fill(next.begin(), next.end(), -1);
        bool any = false;
        if (g == kUnlimited) {
            std::int64_t run = -1;
            for (std::size_t k = 0; k < n; ++k) {
                if (k > 0) run = std::max(run, best[k - 1]);
                if (run >= 0 && seq.itemsets[k].contains(pat.itemsets[j])) {
                    next[k] = run;
                    any = true;
                }
            }
        } else {
            for (std::size_t k = j; k < n; ++k) {
                if (!seq.itemsets[k].contains(pat.itemsets[j])) continue;
                std::size_t lo = k > g ? k - g : 0;
                std::int64_t run = -1;
                for (std::size_t p = lo; p < k; ++p) run = std::max(run, best[p]);
                if (run >= 0) {
                    next[k] = run;
                    any = true;
                }
            }
        }
        if (!any) return false;
        best.swap(next);
    }

    for (std::size_t k = 0; k < n; ++k) {
        if (best[k] < 0) continue;
        if (w == kUnlimited || k - static_cast<std::size_t>(best[k]) <= w) return true;
    }
    return false;
}

Support support(const SequenceDatabase& db, const Pattern& pat, const Constraints& c) {
    if (db.empty()) throw EmptyDatabase();
    const auto n = static_cast<std::int64_t>(db.size());
    std::size_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
    for (std::int64_t i = 0; i < n; ++i)
        if (contains(db.sequences[static_cast<std::size_t>(i)], pat, c)) ++count;
    return Support{count, static_cast<double>(count) / static_cast<double>(db.size())};
}

bool pattern_contains(const Pattern& super, const Pattern& sub) {
    // Unconstrained subsequence test: greedy earliest match is exact here
    // because taking the first superset element always leaves the largest
    // possible suffix.
    std::size_t j = 0;
    for (const auto& elem : super.itemsets) {
        if (j == sub.size()) break;
        if (elem.contains(sub.itemsets[j])) ++j;
    }
    return j == sub.size();
}

std::string canonical_render(const Pattern& pat, const Alphabet& alphabet) {
    std::string out;
    for (std::size_t e = 0; e < pat.size(); ++e) {
        if (e > 0) out += " -> ";
        std::vector<std::string> labels;
        labels.reserve(pat.itemsets[e].size());
        for (ItemId id : pat.itemsets[e].items) labels.push_back(alphabet.label(id));
        std::sort(labels.begin(), labels.end());
        out += '{';
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (i > 0) out += ',';
            out += labels[i];
        }
        out += '}';
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

Pattern parse_pattern(std::string_view text, const Alphabet& alphabet) {
    Pattern pat;
    std::size_t pos = 0;
    bool saw_element = false;
    while (pos <= text.size()) {
        std::size_t arrow = text.find("->", pos);
        std::string_view chunk = arrow == std::string_view::npos
                                     ? text.substr(pos)
                                     : text.substr(pos, arrow - pos);
        chunk = trim(chunk);
        if (chunk.empty()) throw BadPatternSyntax("empty pattern element");
        if (chunk.front() == '{') {
            if (chunk.back() != '}') throw BadPatternSyntax("unbalanced braces in pattern element");
            chunk = trim(chunk.substr(1, chunk.size() - 2));
        } else if (chunk.find('}') != std::string_view::npos) {
            throw BadPatternSyntax("unbalanced braces in pattern element");
        }
        std::vector<ItemId> ids;
        std::size_t start = 0;
        while (start <= chunk.size()) {
            std::size_t comma = chunk.find(',', start);
            std::string_view tok = comma == std::string_view::npos
                                       ? chunk.substr(start)
                                       : chunk.substr(start, comma - start);
            tok = trim(tok);
            if (tok.empty()) throw BadPatternSyntax("empty item label in pattern element");
            auto id = alphabet.find(tok);
            if (!id) throw UnknownLabel(tok);
            ids.push_back(*id);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        pat.itemsets.emplace_back(std::move(ids));
        saw_element = true;
        if (arrow == std::string_view::npos) break;
        pos = arrow + 2;
    }
    if (!saw_element) throw BadPatternSyntax("empty pattern");
    return pat;
}

bool canonical_less(const Pattern& a, const Pattern& b, const Alphabet& alphabet) {
    std::size_t ia = a.item_count(), ib = b.item_count();
    if (ia != ib) return ia < ib;
    return canonical_render(a, alphabet) < canonical_render(b, alphabet);
}

void sort_canonical(std::vector<PatternStats>& results, const Alphabet& alphabet) {
    struct Key {
        std::size_t items;
        std::string text;
        std::size_t index;
    };
    std::vector<Key> keys;
    keys.reserve(results.size());
    for (std::size_t i = 0; i < results.size(); ++i)
        keys.push_back({results[i].pattern.item_count(),
                        canonical_render(results[i].pattern, alphabet), i});
    std::sort(keys.begin(), keys.end(), [](const Key& x, const Key& y) {
        if (x.items != y.items) return x.items < y.items;
        return x.text < y.text;
    });
    std::vector<PatternStats> out;
    out.reserve(results.size());
    for (const auto& k : keys) out.push_back(std::move(results[k.index]));
    results = std::move(out);
}

}  // namespace seqmine
