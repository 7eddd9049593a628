#pragma once

// Higher-level analyses over mined patterns: two-group differential
// comparison, temporal-evolution ranking over sequence bins, closed and
// generator filtering, and rule interestingness metrics.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqmine/model.hpp"
#include "seqmine/preprocess.hpp"
#include "seqmine/stats.hpp"

namespace seqmine::analysis {

struct NotTwoGroups : std::runtime_error {
    explicit NotTwoGroups(const std::string& what) : std::runtime_error(what) {}
};

struct GroupTooSmall : std::runtime_error {
    explicit GroupTooSmall(const std::string& name)
        : std::runtime_error("group '" + name + "' needs at least 2 sequences") {}
};

struct AllSequencesExcluded : std::runtime_error {
    AllSequencesExcluded() : std::runtime_error("every sequence is too short for the bin count") {}
};

struct ZeroComponentSupport : std::runtime_error {
    ZeroComponentSupport() : std::runtime_error("rule component has zero support") {}
};

struct GroupSummary {
    std::string name;
    std::size_t n = 0;
    std::size_t support_count = 0;
    double f_support = 0.0;
    double mean_instances = 0.0;
    double sd_instances = 0.0;
};

struct DifferentialRow {
    Pattern pattern;
    GroupSummary group_a, group_b;   // a = lexicographically smaller group name
    stats::TestResult support_test;   // chi-square on contains/not x group
    stats::TestResult instance_test;  // Welch's t on per-sequence instance counts
    double q_support = 1.0;
    double q_instance = 1.0;
};

// Mines each group separately under `c`, unions the candidates, and
// tests every candidate for between-group differences in containment
// (chi-square) and instance counts (Welch's t). Sequences not containing
// a candidate contribute an instance count of 0. The two p-value
// families are BH-adjusted independently. Rows come back sorted by
// min(q_support, q_instance) ascending, ties in canonical pattern order.
// When every sequence contains a candidate the chi-square table is
// degenerate and the row reports statistic 0, p 1. Every sequence needs
// a group label and exactly two labels must occur (NotTwoGroups), each
// with at least 2 sequences (GroupTooSmall).
std::vector<DifferentialRow> differential(const SequenceDatabase& db, const Constraints& c);

struct EvolutionRow {
    Pattern pattern;
    std::vector<double> bin_means;  // mean instance count per bin
    double eta_squared = 0.0;
    stats::TestResult anova;
    std::size_t rank = 0;  // 1-based, by eta_squared descending
};

struct EvolutionResult {
    std::vector<EvolutionRow> rows;
    std::size_t bins = 0;
    std::size_t subjects = 0;
    std::vector<std::string> excluded;  // sequences too short to fill every bin
};

// Mines the whole database, slices each sequence into n_bins contiguous
// equal bins, and ranks the mined patterns by how much their per-bin
// instance counts vary across bins (eta squared, with a repeated
// measures ANOVA per pattern). Sequences shorter than n_bins are
// excluded and reported. Throws preprocess::TooFewBins for n_bins < 2
// and AllSequencesExcluded when nothing survives.
EvolutionResult evolve(const SequenceDatabase& db, std::size_t n_bins, const Constraints& c);

// Evolution over natural segments (per day or per session) instead of
// equal bins. The bin count is the largest segment count any sequence
// produces; sequences with fewer segments are excluded.
EvolutionResult evolve_segmented(const SequenceDatabase& db, preprocess::SplitMode mode,
                                 std::int64_t session_gap_seconds, const Constraints& c);

// Keeps patterns with no equal-support strict super-pattern in the
// result set. Meaningful on a complete frequent set.
std::vector<PatternStats> filter_closed(const std::vector<PatternStats>& results);

// Keeps patterns with no equal-support strict sub-pattern in the result
// set, counting the empty pattern (support = db_size) as a sub-pattern
// of everything.
std::vector<PatternStats> filter_generators(const std::vector<PatternStats>& results,
                                            std::size_t db_size);

struct RuleMetrics {
    double lift = 0.0;
    double jaccard = 0.0;
};

// Treats the pattern as rule X -> Y with Y its last itemset and X the
// rest. With F-supports s (whole pattern), sx, sy under `c`:
// lift = s / (sx * sy), jaccard = s / (sx + sy - s). The pattern needs
// at least 2 itemsets; zero-support components raise ZeroComponentSupport.
RuleMetrics rule_metrics(const Pattern& pat, const SequenceDatabase& db, const Constraints& c);

// TSV writers. One "#"-prefixed line documents the columns, then one row
// per pattern in the result order.
void write_differential(const std::vector<DifferentialRow>& rows, const Alphabet& alphabet,
                        std::ostream& out);
void write_evolution(const EvolutionResult& result, const Alphabet& alphabet, std::ostream& out);

}  // namespace seqmine::analysis
