#pragma once

// Core data model for categorical event sequences: interned alphabet,
// itemsets, sequences with optional per-event metadata, patterns, mining
// constraints, and the containment / support primitives everything else
// builds on.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace seqmine {

using ItemId = std::uint32_t;

struct UnknownItemId : std::out_of_range {
    explicit UnknownItemId(ItemId id)
        : std::out_of_range("unknown item id " + std::to_string(id)) {}
};

struct UnknownLabel : std::out_of_range {
    explicit UnknownLabel(std::string_view label)
        : std::out_of_range("unknown item label '" + std::string(label) + "'") {}
};

struct EmptyDatabase : std::runtime_error {
    EmptyDatabase() : std::runtime_error("sequence database is empty") {}
};

struct InvalidConstraints : std::runtime_error {
    explicit InvalidConstraints(const std::string& what) : std::runtime_error(what) {}
};

struct BadPatternSyntax : std::runtime_error {
    explicit BadPatternSyntax(const std::string& what) : std::runtime_error(what) {}
};

// Bidirectional label <-> dense id map. Ids are assigned in first-intern
// order, which keeps downstream output deterministic for a given input.
class Alphabet {
public:
    ItemId intern(std::string_view label);
    std::optional<ItemId> find(std::string_view label) const;
    const std::string& label(ItemId id) const;  // throws UnknownItemId
    std::size_t size() const { return labels_.size(); }

private:
    std::unordered_map<std::string, ItemId> ids_;
    std::vector<std::string> labels_;
};

// Set of item ids held sorted ascending with no duplicates.
struct Itemset {
    std::vector<ItemId> items;

    Itemset() = default;
    explicit Itemset(std::vector<ItemId> ids);
    Itemset(std::initializer_list<ItemId> ids);

    bool empty() const { return items.empty(); }
    std::size_t size() const { return items.size(); }
    bool has(ItemId id) const;
    bool contains(const Itemset& sub) const;  // subset test
    ItemId max_item() const { return items.back(); }

    bool operator==(const Itemset&) const = default;
    auto operator<=>(const Itemset&) const = default;
};

// Optional per-event metadata carried through preprocessing. `numeric`
// holds any extra numeric columns from event-table input, keyed by
// column name.
struct EventMeta {
    std::optional<std::int64_t> timestamp;
    std::optional<double> duration;
    std::optional<std::string> actor;
    std::map<std::string, double, std::less<>> numeric;

    // Unified attribute lookup: "duration" resolves to the duration
    // field, anything else to the numeric map.
    std::optional<double> attribute(std::string_view name) const;

    bool operator==(const EventMeta&) const = default;
};

struct Sequence {
    std::string id;
    std::vector<Itemset> itemsets;
    // Either empty (no metadata) or exactly one entry per itemset.
    std::vector<EventMeta> meta;
    std::optional<std::string> group;

    std::size_t length() const { return itemsets.size(); }
    bool has_meta() const { return !meta.empty(); }
    // nullptr when the sequence carries no metadata.
    const EventMeta* meta_at(std::size_t pos) const;
};

struct SequenceDatabase {
    Alphabet alphabet;
    std::vector<Sequence> sequences;

    std::size_t size() const { return sequences.size(); }
    bool empty() const { return sequences.empty(); }
};

// Ordered list of itemsets. Containment in a sequence maps pattern
// elements to strictly increasing positions whose itemsets are supersets
// of the corresponding pattern elements.
struct Pattern {
    std::vector<Itemset> itemsets;

    Pattern() = default;
    explicit Pattern(std::vector<Itemset> elems) : itemsets(std::move(elems)) {}
    Pattern(std::initializer_list<Itemset> elems) : itemsets(elems) {}

    bool empty() const { return itemsets.empty(); }
    std::size_t size() const { return itemsets.size(); }
    std::size_t item_count() const;

    bool operator==(const Pattern&) const = default;
    auto operator<=>(const Pattern&) const = default;
};

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

// Mining constraints. Gaps are measured between consecutive matched
// positions: gap = k[j+1] - k[j], so max_gap = 1 admits only adjacent
// positions. The window bounds k[last] - k[first]. Limits use kUnlimited
// for "no bound".
struct Constraints {
    std::optional<double> min_support;      // fraction of sequences, (0, 1]
    std::optional<std::size_t> min_count;   // absolute sequence count, >= 1
    std::size_t max_gap = kUnlimited;       // >= 1
    std::size_t max_window = kUnlimited;    // >= 0
    std::size_t min_items = 1;              // total items across elements
    std::size_t max_items = kUnlimited;

    void validate() const;  // throws InvalidConstraints

    // Minimal supporting-sequence count a pattern needs in a database of
    // the given size: max(min_count, ceil(min_support * db_size)),
    // defaulting to 1 when neither threshold is set.
    std::size_t support_threshold(std::size_t db_size) const;
};

// True when the pattern occurs in the sequence under the gap and window
// bounds. The pattern must be non-empty.
bool contains(const Sequence& seq, const Pattern& pat, const Constraints& c);

struct Support {
    std::size_t count = 0;
    double fraction = 0.0;
};

// Number / fraction of database sequences containing the pattern.
// Throws EmptyDatabase on an empty database.
Support support(const SequenceDatabase& db, const Pattern& pat, const Constraints& c);

// Structural sub-pattern test ignoring gap and window bounds: sub's
// elements map order-preservingly onto a subset of super's elements.
bool pattern_contains(const Pattern& super, const Pattern& sub);

// Renders "{a,b} -> {c}": labels inside an element sorted
// lexicographically and joined by commas, elements joined by " -> ".
std::string canonical_render(const Pattern& pat, const Alphabet& alphabet);

// Inverse of canonical_render. Accepts optional braces around single-item
// elements and arbitrary whitespace around tokens. Throws BadPatternSyntax
// on malformed text and UnknownLabel for labels missing from the alphabet.
Pattern parse_pattern(std::string_view text, const Alphabet& alphabet);

// Canonical result order: item count ascending, then rendered form
// ascending. Strict weak ordering used everywhere results are sorted.
bool canonical_less(const Pattern& a, const Pattern& b, const Alphabet& alphabet);

// One mined pattern with its support bookkeeping. `supporting` holds
// indexes into the database's sequence vector, ascending. `i_support_total`
// sums the per-sequence maximum counts of pairwise position-disjoint
// occurrences over the supporting sequences.
struct PatternStats {
    Pattern pattern;
    std::vector<std::uint32_t> supporting;
    std::size_t support_count = 0;
    double f_support = 0.0;
    std::uint64_t i_support_total = 0;
};

void sort_canonical(std::vector<PatternStats>& results, const Alphabet& alphabet);

}  // namespace seqmine
