#pragma once

// Readers and writers for the two input formats (basket lines and event
// tables) and the tabular outputs (pattern lists, instance matrices).

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqmine/model.hpp"

namespace seqmine::io {

struct ParseError : std::runtime_error {
    std::size_t line;  // 1-based input line, 0 when not tied to one line
    ParseError(std::size_t line_no, const std::string& what)
        : std::runtime_error(line_no ? "line " + std::to_string(line_no) + ": " + what : what),
          line(line_no) {}
};

struct MalformedLine : ParseError {
    using ParseError::ParseError;
};

struct NonIntegerEventId : ParseError {
    using ParseError::ParseError;
};

struct DuplicateEventId : ParseError {
    using ParseError::ParseError;
};

struct TimestampOrder : ParseError {
    using ParseError::ParseError;
};

struct MissingColumn : std::runtime_error {
    explicit MissingColumn(const std::string& name)
        : std::runtime_error("missing required column '" + name + "'") {}
};

struct InconsistentGroup : std::runtime_error {
    explicit InconsistentGroup(const std::string& seq_id)
        : std::runtime_error("sequence '" + seq_id + "' has conflicting group values") {}
};

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

// Basket format: one event per line, "sequence_id;event_id;labels", no
// header. The labels field may hold several comma-separated labels that
// form one itemset. Events are ordered by their integer event_id within
// each sequence; sequences keep first-appearance order. Blank lines are
// skipped. No metadata or groups in this format.
SequenceDatabase parse_basket(std::istream& in, char delimiter = ';');

// Event-table format: CSV with a header row. Required columns
// sequence_id, event_id, label; recognized optional columns timestamp
// (integer), duration (number), actor, group; any other column is read
// as a numeric per-event attribute (empty cells mean absent). Fields may
// be quoted CSV-style with doubled quotes; embedded newlines are not
// supported. A quoted label field may hold a comma-separated itemset.
// Each sequence's group must be unanimous across its events
// (InconsistentGroup); after ordering by event_id, timestamps must be
// non-decreasing (TimestampOrder).
SequenceDatabase parse_event_table(std::istream& in);

// Inverse of parse_basket: event_id is the 1-based position, itemset
// labels joined by commas in lexicographic order. Metadata and groups
// are not representable here and are dropped.
void write_basket(const SequenceDatabase& db, std::ostream& out, char delimiter = ';');

// Inverse of parse_event_table. Emits only the optional columns that are
// populated somewhere in the database; extra numeric attribute columns
// appear after the recognized ones in name order. event_id is the
// 1-based position.
void write_event_table(const SequenceDatabase& db, std::ostream& out);

// TSV pattern listing: header "pattern<TAB>support_count<TAB>f_support
// <TAB>i_support_total", rows in canonical order, f_support with 6
// decimal places.
void write_patterns(const std::vector<PatternStats>& results, const Alphabet& alphabet,
                    std::ostream& out);

// CSV instance matrix: header "sequence_id" then one column per pattern
// (canonical text, CSV-quoted), one row per sequence in database order.
// Throws DimensionMismatch when the matrix shape disagrees with the
// database and pattern list.
void write_instance_matrix(const SequenceDatabase& db, const std::vector<Pattern>& patterns,
                           const std::vector<std::vector<std::uint32_t>>& matrix,
                           std::ostream& out);

}  // namespace seqmine::io
