#pragma once

// Event-log preprocessing: label filtering, run collapsing, attribute
// contextualization, pattern-to-symbol rewriting, and sequence
// segmentation (by actor, by day, by session gap, or into equal bins).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqmine/model.hpp"

namespace seqmine::preprocess {

struct MultiItemEvent : std::runtime_error {
    explicit MultiItemEvent(const std::string& what) : std::runtime_error(what) {}
};

struct MissingAttribute : std::runtime_error {
    explicit MissingAttribute(const std::string& what) : std::runtime_error(what) {}
};

struct MissingTimestamp : std::runtime_error {
    explicit MissingTimestamp(const std::string& seq_id)
        : std::runtime_error("sequence '" + seq_id + "' has events without timestamps") {}
};

struct BadRuleSyntax : std::runtime_error {
    explicit BadRuleSyntax(const std::string& what) : std::runtime_error(what) {}
};

struct TooFewBins : std::runtime_error {
    TooFewBins() : std::runtime_error("segmentation needs at least 2 bins") {}
};

// Removes every excluded label; events whose itemsets become empty are
// dropped. The output alphabet is rebuilt from the surviving labels.
SequenceDatabase filter_events(const SequenceDatabase& db, const std::set<std::string>& excluded);

// Replaces each maximal run of >= 2 consecutive identical single-item
// events with one event labeled "<label><suffix>". When `targets` is set
// only those labels collapse. The collapsed event keeps the run's first
// timestamp, actor, and extra attributes, and sums the durations present
// in the run. Requires single-item events throughout (MultiItemEvent).
SequenceDatabase collapse_runs(const SequenceDatabase& db,
                               const std::optional<std::set<std::string>>& targets,
                               const std::string& suffix = "-MULT");

struct ContextRule {
    std::string attribute;  // "duration" or an extra numeric column
    double threshold = 0.0;
    std::string low_suffix;   // applied when value <= threshold
    std::string high_suffix;  // applied when value > threshold
};

// Appends the low or high suffix to every label of each event depending
// on the event's attribute value. Events lacking the attribute raise
// MissingAttribute.
SequenceDatabase contextualize(const SequenceDatabase& db, const ContextRule& rule);

struct RewriteRule {
    std::vector<std::string> lhs;  // consecutive labels to match
    std::string rhs;               // replacement label
};

// Single left-to-right pass per sequence replacing consecutive label
// matches with the rule's symbol; longer left-hand sides win at a given
// position, earlier rules break length ties. Replacements take the first
// matched event's timestamp, actor, and extra attributes, and sum the
// matched durations. Rewritten output is not rescanned. Requires
// single-item events (MultiItemEvent).
SequenceDatabase abstract_rewrite(const SequenceDatabase& db,
                                  const std::vector<RewriteRule>& rules);

enum class SplitMode { by_actor, by_day, by_session };

// Splits each sequence into subsequences: per distinct actor value
// (by_actor, ids suffixed ":<actor>"), per UTC day (by_day, ids suffixed
// ":d<k>"), or at timestamp gaps above `session_gap_seconds` (by_session,
// ids suffixed ":s<k>"). Children keep the parent's group and appear in
// first-event order. by_day and by_session require timestamps on every
// event (MissingTimestamp); by_actor treats missing actors as the empty
// actor value.
SequenceDatabase split_sequences(const SequenceDatabase& db, SplitMode mode,
                                 std::int64_t session_gap_seconds = 0);

// Same splitting, grouped per parent sequence in database order. Parents
// with no events yield an empty inner vector.
std::vector<std::vector<Sequence>> split_segments(const SequenceDatabase& db, SplitMode mode,
                                                  std::int64_t session_gap_seconds = 0);

struct BinSegments {
    // bins[k] holds the k-th slice of every sequence long enough to fill
    // all bins, in database order, sharing the parent alphabet.
    std::vector<SequenceDatabase> bins;
    // ids of sequences shorter than the bin count, excluded from `bins`
    std::vector<std::string> short_sequence_ids;
};

// Cuts each sequence into n_bins contiguous slices with remainder events
// distributed to the earliest bins. Sequences with fewer events than
// bins are flagged and excluded. n_bins >= 2 (TooFewBins).
BinSegments segment_bins(const SequenceDatabase& db, std::size_t n_bins);

// Rule-file parsers. Rewrite rules: one "lhs1|lhs2|... -> rhs" per line.
// Context rules: one "attribute,threshold,low_suffix,high_suffix" per
// line. '#' comment lines and blank lines are skipped in both.
std::vector<RewriteRule> parse_rewrite_rules(std::istream& in);
std::vector<ContextRule> parse_context_rules(std::istream& in);

}  // namespace seqmine::preprocess
