#pragma once

// Frequent pattern mining under the Constraints thresholds. mine() is the
// production depth-first miner; mine_bruteforce() is a deliberately simple
// exhaustive reference for cross-checking it on small inputs.

#include <stdexcept>
#include <vector>

#include "seqmine/model.hpp"

namespace seqmine {

struct InstanceTooLarge : std::runtime_error {
    explicit InstanceTooLarge(const std::string& what) : std::runtime_error(what) {}
};

// All patterns whose supporting-sequence count meets the threshold and
// whose item count lies in [min_items, max_items], in canonical order
// (item count ascending, rendered form ascending). Fills every
// PatternStats field including i_support_total. Parallelized over the
// first pattern item; output is identical for any thread count.
// Throws EmptyDatabase / InvalidConstraints.
std::vector<PatternStats> mine(const SequenceDatabase& db, const Constraints& c);

// Exhaustive reference miner: enumerates candidate patterns outright and
// tests containment sequence by sequence, single threaded. Refuses inputs
// beyond 64 total items or 8 alphabet symbols (InstanceTooLarge). Result
// contract identical to mine().
std::vector<PatternStats> mine_bruteforce(const SequenceDatabase& db, const Constraints& c);

}  // namespace seqmine
