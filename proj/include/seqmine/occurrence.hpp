#pragma once

// Instance counting: the maximum number of pairwise position-disjoint
// occurrences of a pattern inside one sequence, and the per-sequence
// instance matrix over a pattern list.

#include <cstdint>
#include <vector>

#include "seqmine/model.hpp"

namespace seqmine {

// Maximum number of occurrences of `pat` in `seq` (under the gap and
// window bounds of `c`) such that no two selected occurrences share a
// sequence position. Zero when the pattern is not contained at all.
//
// Strategy: a greedy sweep that repeatedly extracts the occurrence with
// the smallest end position gives a lower bound L, and the scarcest
// pattern element gives an upper bound U = min_j |positions matching
// element j|. When L == U the greedy answer is certified optimal, which
// covers almost every practical input. Otherwise an exact branch and
// bound over occurrence sets resolves the gap. Pathological inputs that
// exhaust the internal search budget fall back to the greedy bound; see
// kSearchBudget in occurrence.cpp.
std::uint32_t count_instances(const Sequence& seq, const Pattern& pat, const Constraints& c);

// rows = sequences in database order, columns = patterns in the given
// order, cell = count_instances. Throws EmptyDatabase.
std::vector<std::vector<std::uint32_t>> instance_matrix(const SequenceDatabase& db,
                                                        const std::vector<Pattern>& patterns,
                                                        const Constraints& c);

}  // namespace seqmine
