#pragma once

// Shared test databases and builders.

#include <string>
#include <vector>

#include "seqmine/model.hpp"

namespace fixtures {

using namespace seqmine;

inline Sequence make_seq(std::string id, std::vector<std::vector<ItemId>> events) {
    Sequence s;
    s.id = std::move(id);
    for (auto& e : events) s.itemsets.push_back(Itemset(std::move(e)));
    return s;
}

// Four short sequences over items a..g with multi-item events; the
// classic worked example for containment and instance counting.
inline SequenceDatabase basket_demo_db() {
    SequenceDatabase db;
    const ItemId a = db.alphabet.intern("a");
    const ItemId b = db.alphabet.intern("b");
    const ItemId c = db.alphabet.intern("c");
    const ItemId d = db.alphabet.intern("d");
    const ItemId e = db.alphabet.intern("e");
    const ItemId f = db.alphabet.intern("f");
    const ItemId g = db.alphabet.intern("g");
    db.sequences.push_back(make_seq("S1", {{a, b}, {c}, {d}}));
    db.sequences.push_back(make_seq("S2", {{a, c}}));
    db.sequences.push_back(make_seq("S3", {{b}, {c, d, e}, {f, b}, {c}}));
    db.sequences.push_back(make_seq("S4", {{b, c}, {d}, {g}}));
    return db;
}

// Four single-item study-log sequences (read / hint / attempt / note);
// mining them at min_support 0.5, max_gap 1, min_items 2 yields exactly
// four patterns.
inline SequenceDatabase study_log_db() {
    SequenceDatabase db;
    const ItemId read = db.alphabet.intern("read");
    const ItemId hint = db.alphabet.intern("hint");
    const ItemId attempt = db.alphabet.intern("attempt");
    const ItemId note = db.alphabet.intern("note");
    db.sequences.push_back(
        make_seq("S1", {{read}, {hint}, {attempt}, {note}, {attempt}, {attempt}}));
    db.sequences.push_back(make_seq("S2", {{read}, {attempt}}));
    db.sequences.push_back(make_seq("S3", {{hint}, {read}, {attempt}, {note}, {attempt}}));
    db.sequences.push_back(make_seq("S4", {{hint}, {note}, {read}, {attempt}}));
    return db;
}

inline Pattern pat(std::initializer_list<std::initializer_list<ItemId>> elems) {
    Pattern p;
    for (const auto& e : elems) p.itemsets.push_back(Itemset(std::vector<ItemId>(e)));
    return p;
}

}  // namespace fixtures
