#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "seqmine/analysis.hpp"
#include "seqmine/mine.hpp"

using namespace seqmine;
using fixtures::make_seq;
using fixtures::pat;
using doctest::Approx;

namespace {

SequenceDatabase two_group_db() {
    // five "treat" sequences x y, five "ctrl" sequences x z
    SequenceDatabase db;
    const ItemId x = db.alphabet.intern("x");
    const ItemId y = db.alphabet.intern("y");
    const ItemId z = db.alphabet.intern("z");
    for (int i = 0; i < 5; ++i) {
        auto s = make_seq("t" + std::to_string(i), {{x}, {y}});
        s.group = "treat";
        db.sequences.push_back(std::move(s));
    }
    for (int i = 0; i < 5; ++i) {
        auto s = make_seq("c" + std::to_string(i), {{x}, {z}});
        s.group = "ctrl";
        db.sequences.push_back(std::move(s));
    }
    return db;
}

Constraints diff_constraints() {
    Constraints c;
    c.min_support = 0.6;
    c.min_items = 2;
    return c;
}

}  // namespace

TEST_CASE("differential separates a planted group difference") {
    auto db = two_group_db();
    const ItemId x = 0, y = 1, z = 2;
    auto rows = analysis::differential(db, diff_constraints());

    // union of per-group results: x->y from treat, x->z from ctrl
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].pattern == pat({{x}, {y}}));  // canonical tie order
    CHECK(rows[1].pattern == pat({{x}, {z}}));

    const auto& r = rows[0];
    CHECK(r.group_a.name == "ctrl");  // lexicographically first
    CHECK(r.group_b.name == "treat");
    CHECK(r.group_a.n == 5);
    CHECK(r.group_a.support_count == 0);
    CHECK(r.group_a.f_support == 0.0);
    CHECK(r.group_a.mean_instances == 0.0);
    CHECK(r.group_b.support_count == 5);
    CHECK(r.group_b.f_support == 1.0);
    CHECK(r.group_b.mean_instances == 1.0);
    CHECK(r.group_b.sd_instances == 0.0);

    // 5/5 vs 0/5 containment
    CHECK(r.support_test.statistic == Approx(10.0).epsilon(1e-9));
    CHECK(r.support_test.p_value < 0.01);
    CHECK(r.q_support == Approx(r.support_test.p_value).epsilon(1e-12));  // equal tie q = p
    // zero-variance instance counts with different means: degenerate limit
    CHECK(r.instance_test.degenerate);
    CHECK(r.instance_test.p_value == 0.0);
    CHECK(r.instance_test.statistic == -std::numeric_limits<double>::infinity());
    CHECK(r.q_instance == 0.0);
}

TEST_CASE("differential is label-symmetric up to sign") {
    auto db = two_group_db();
    auto rows = analysis::differential(db, diff_constraints());

    // renaming treat below ctrl swaps the roles of a and b
    auto flipped_db = db;
    for (auto& s : flipped_db.sequences)
        if (s.group == "treat") s.group = "aaa";
    auto flipped = analysis::differential(flipped_db, diff_constraints());

    REQUIRE(rows.size() == flipped.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].pattern == flipped[i].pattern);
        CHECK(flipped[i].group_a.name == "aaa");
        CHECK(flipped[i].group_a.f_support == rows[i].group_b.f_support);
        CHECK(flipped[i].group_b.f_support == rows[i].group_a.f_support);
        CHECK(flipped[i].support_test.statistic ==
              Approx(rows[i].support_test.statistic).epsilon(1e-12));
        CHECK(flipped[i].support_test.p_value ==
              Approx(rows[i].support_test.p_value).epsilon(1e-12));
        CHECK(flipped[i].instance_test.statistic == -rows[i].instance_test.statistic);
        CHECK(flipped[i].q_support == Approx(rows[i].q_support).epsilon(1e-12));
        CHECK(flipped[i].q_instance == Approx(rows[i].q_instance).epsilon(1e-12));
    }
}

TEST_CASE("identical groups show no differences") {
    SequenceDatabase db;
    const ItemId x = db.alphabet.intern("x");
    const ItemId y = db.alphabet.intern("y");
    for (int g = 0; g < 2; ++g)
        for (int i = 0; i < 3; ++i) {
            auto s = make_seq((g ? "b" : "a") + std::to_string(i), {{x}, {y}});
            s.group = g ? "g2" : "g1";
            db.sequences.push_back(std::move(s));
        }
    Constraints c;
    c.min_support = 0.5;
    c.min_items = 2;
    auto rows = analysis::differential(db, c);
    REQUIRE(rows.size() == 1);
    // unanimous containment: synthesized no-difference support test
    CHECK(rows[0].support_test.statistic == 0.0);
    CHECK(rows[0].support_test.p_value == 1.0);
    CHECK(rows[0].instance_test.p_value == 1.0);
    CHECK(rows[0].q_support == 1.0);
    CHECK(rows[0].q_instance == 1.0);
}

TEST_CASE("differential validates its grouping") {
    auto db = two_group_db();
    Constraints c = diff_constraints();

    auto no_groups = db;
    no_groups.sequences[3].group.reset();
    CHECK_THROWS_AS(analysis::differential(no_groups, c), analysis::NotTwoGroups);

    auto three = db;
    three.sequences[0].group = "third";
    three.sequences[1].group = "third";
    CHECK_THROWS_AS(analysis::differential(three, c), analysis::NotTwoGroups);

    auto tiny = db;
    for (std::size_t i = 1; i < 5; ++i) tiny.sequences[i].group = "ctrl";
    CHECK_THROWS_AS(analysis::differential(tiny, c), analysis::GroupTooSmall);

    SequenceDatabase empty;
    CHECK_THROWS_AS(analysis::differential(empty, c), EmptyDatabase);
}

TEST_CASE("closed filtering keeps only maximal equal-support patterns") {
    auto db = fixtures::study_log_db();
    const ItemId read = 0, attempt = 2, note = 3;
    Constraints c;
    c.min_support = 0.5;
    c.max_gap = 1;
    c.min_items = 2;
    auto mined = mine(db, c);
    REQUIRE(mined.size() == 4);

    auto closed = analysis::filter_closed(mined);
    // attempt->note and note->attempt (support 2) sit inside
    // attempt->note->attempt (also support 2) and drop out
    REQUIRE(closed.size() == 2);
    CHECK(closed[0].pattern == pat({{read}, {attempt}}));
    CHECK(closed[1].pattern == pat({{attempt}, {note}, {attempt}}));
}

TEST_CASE("generator filtering keeps minimal equal-support patterns") {
    auto db = fixtures::study_log_db();
    const ItemId read = 0, hint = 1, attempt = 2, note = 3;
    Constraints c;
    c.min_support = 0.5;
    c.max_gap = 1;
    c.min_items = 1;
    auto mined = mine(db, c);
    REQUIRE(mined.size() == 8);

    auto gens = analysis::filter_generators(mined, db.size());
    // {attempt} and {read} appear in every sequence, so the empty pattern
    // (support 4) already explains them; attempt->note->attempt contains
    // the equal-support attempt->note
    REQUIRE(gens.size() == 5);
    CHECK(gens[0].pattern == pat({{hint}}));
    CHECK(gens[1].pattern == pat({{note}}));
    CHECK(gens[2].pattern == pat({{attempt}, {note}}));
    CHECK(gens[3].pattern == pat({{note}, {attempt}}));
    CHECK(gens[4].pattern == pat({{read}, {attempt}}));
}

TEST_CASE("closed and generators agree with first principles on random data") {
    std::mt19937 rng(3307);
    for (int t = 0; t < 10; ++t) {
        SequenceDatabase db;
        for (int a = 0; a < 3; ++a) db.alphabet.intern(std::string(1, char('a' + a)));
        std::uniform_int_distribution<std::size_t> len(2, 6);
        std::uniform_int_distribution<ItemId> item(0, 2);
        for (int s = 0; s < 6; ++s) {
            std::vector<std::vector<ItemId>> ev(len(rng));
            for (auto& e : ev) e = {item(rng)};
            db.sequences.push_back(make_seq("s" + std::to_string(s), std::move(ev)));
        }
        Constraints c;
        c.min_support = 0.34;
        c.min_items = 1;
        c.max_items = 3;
        auto mined = mine(db, c);
        auto closed = analysis::filter_closed(mined);
        auto gens = analysis::filter_generators(mined, db.size());
        for (const auto& ps : closed)
            for (const auto& other : mined)
                if (pattern_contains(other.pattern, ps.pattern) && other.pattern != ps.pattern)
                    CHECK(other.support_count < ps.support_count);
        for (const auto& ps : gens) {
            CHECK(ps.support_count < db.size());
            for (const auto& other : mined)
                if (pattern_contains(ps.pattern, other.pattern) && other.pattern != ps.pattern)
                    CHECK(other.support_count > ps.support_count);
        }
    }
}

TEST_CASE("rule metrics on the demo database") {
    auto db = fixtures::basket_demo_db();
    Constraints free;
    const ItemId b = 1, cc = 2;
    // {b} -> {c}: s = 0.5, s_head = 0.75, s_tail = 1.0
    auto m = analysis::rule_metrics(pat({{b}, {cc}}), db, free);
    CHECK(m.lift == Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(m.jaccard == Approx(0.4).epsilon(1e-12));

    CHECK_THROWS_AS(analysis::rule_metrics(pat({{b}}), db, free), std::invalid_argument);

    auto db2 = db;
    const ItemId ghost = db2.alphabet.intern("ghost");
    CHECK_THROWS_AS(analysis::rule_metrics(pat({{ghost}, {cc}}), db2, free),
                    analysis::ZeroComponentSupport);
}

TEST_CASE("rule metrics stay within their analytic ranges") {
    std::mt19937 rng(3308);
    auto db = fixtures::basket_demo_db();
    Constraints free;
    std::uniform_int_distribution<ItemId> item(0, 6);
    int tested = 0;
    for (int t = 0; t < 200; ++t) {
        Pattern p{{Itemset{item(rng)}, Itemset{item(rng)}}};
        auto s = support(db, p, free).fraction;
        auto m = analysis::rule_metrics(p, db, free);
        CHECK(m.jaccard >= 0.0);
        CHECK(m.jaccard <= 1.0);
        CHECK(m.lift >= 0.0);
        if (s > 0) CHECK(m.jaccard > 0.0);
        ++tested;
    }
    CHECK(tested == 200);
}

namespace {

// Four 12-event subjects: x y in every third, p q only in the last
// third, filler labels unique per subject so nothing else is frequent.
// A fifth 2-event sequence is too short for 3 bins.
SequenceDatabase evolution_db() {
    SequenceDatabase db;
    const ItemId x = db.alphabet.intern("x");
    const ItemId y = db.alphabet.intern("y");
    const ItemId p = db.alphabet.intern("p");
    const ItemId q = db.alphabet.intern("q");
    for (int i = 0; i < 4; ++i) {
        std::vector<ItemId> u;
        for (int k = 0; k < 4; ++k)
            u.push_back(db.alphabet.intern("u" + std::to_string(i) + "_" + std::to_string(k)));
        db.sequences.push_back(make_seq(
            "subj" + std::to_string(i),
            {{x}, {y}, {u[0]}, {u[1]}, {x}, {y}, {u[2]}, {u[3]}, {p}, {q}, {x}, {y}}));
    }
    db.sequences.push_back(make_seq("tiny", {{x}, {y}}));
    return db;
}

}  // namespace

TEST_CASE("evolution ranks a final-third pattern first and a flat one last") {
    auto db = evolution_db();
    const ItemId x = 0, y = 1, p = 2, q = 3;
    Constraints c;
    c.min_support = 0.8;  // 4 of 5 sequences
    c.max_gap = 1;
    c.min_items = 2;

    auto res = analysis::evolve(db, 3, c);
    CHECK(res.bins == 3);
    CHECK(res.subjects == 4);
    CHECK(res.excluded == std::vector<std::string>{"tiny"});
    // mined on the full db: x->y, p->q, q->x, p->q->x, q->x->y, p->q->x->y
    REQUIRE(res.rows.size() == 6);

    // all patterns confined to the last bin tie at eta^2 = 1; canonical
    // order puts p->q first
    CHECK(res.rows[0].pattern == pat({{p}, {q}}));
    CHECK(res.rows[0].rank == 1);
    CHECK(res.rows[0].eta_squared == Approx(1.0).epsilon(1e-12));
    CHECK(res.rows[0].bin_means == std::vector<double>{0.0, 0.0, 1.0});
    CHECK(res.rows[0].anova.degenerate);  // zero residual, perfect effect
    CHECK(res.rows[0].anova.p_value == 0.0);

    const auto& flat = res.rows.back();
    CHECK(flat.pattern == pat({{x}, {y}}));
    CHECK(flat.rank == 6);
    CHECK(flat.eta_squared == 0.0);
    CHECK(flat.bin_means == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(flat.anova.statistic == 0.0);
    CHECK(flat.anova.p_value == 1.0);

    CHECK_THROWS_AS(analysis::evolve(db, 1, c), preprocess::TooFewBins);
    CHECK_THROWS_AS(analysis::evolve(db, 100, c), analysis::AllSequencesExcluded);
}

TEST_CASE("session-segmented evolution uses the largest segment count") {
    SequenceDatabase db;
    const ItemId x = db.alphabet.intern("x");
    const ItemId y = db.alphabet.intern("y");
    const ItemId p = db.alphabet.intern("p");
    const ItemId q = db.alphabet.intern("q");
    auto with_ts = [&](std::string id, std::vector<std::vector<ItemId>> ev,
                       std::vector<std::int64_t> ts) {
        auto s = make_seq(std::move(id), std::move(ev));
        for (auto t : ts) {
            EventMeta m;
            m.timestamp = t;
            s.meta.push_back(m);
        }
        return s;
    };
    // three subjects with two sessions (second session adds p q), one
    // subject entirely inside a single session
    for (int i = 0; i < 3; ++i)
        db.sequences.push_back(with_ts("s" + std::to_string(i),
                                       {{x}, {y}, {x}, {y}, {p}, {q}},
                                       {0, 10, 10000, 10010, 10020, 10030}));
    db.sequences.push_back(
        with_ts("s3", {{x}, {y}, {x}, {y}, {p}, {q}}, {0, 10, 20, 30, 40, 50}));

    Constraints c;
    c.min_support = 1.0;
    c.max_gap = 1;
    c.min_items = 2;
    auto res = analysis::evolve_segmented(db, preprocess::SplitMode::by_session, 1800, c);
    CHECK(res.bins == 2);
    CHECK(res.subjects == 3);
    CHECK(res.excluded == std::vector<std::string>{"s3"});

    bool found = false;
    for (const auto& r : res.rows)
        if (r.pattern == pat({{p}, {q}})) {
            found = true;
            CHECK(r.bin_means == std::vector<double>{0.0, 1.0});
        }
    CHECK(found);

    // a single session everywhere cannot form bins
    SequenceDatabase one;
    one.alphabet = db.alphabet;
    one.sequences.push_back(db.sequences[3]);  // the single-session subject
    one.sequences.push_back(db.sequences[3]);
    one.sequences[1].id = "s4";
    CHECK_THROWS_AS(
        analysis::evolve_segmented(one, preprocess::SplitMode::by_session, 1800, c),
        preprocess::TooFewBins);
}

TEST_CASE("analysis writers produce one header and one row per pattern") {
    auto db = two_group_db();
    auto rows = analysis::differential(db, diff_constraints());
    std::ostringstream out;
    analysis::write_differential(rows, db.alphabet, out);
    std::istringstream lines(out.str());
    std::string line;
    std::size_t n = 0, header_fields = 0, row_fields = 0;
    while (std::getline(lines, line)) {
        std::size_t fields = 1 + std::count(line.begin(), line.end(), '\t');
        if (n == 0) {
            CHECK(line[0] == '#');
            header_fields = fields;
            CHECK(line.substr(0, 8) == "#pattern");
        } else {
            row_fields = fields;
            CHECK(line.find("{x} -> {") == 0);
        }
        ++n;
    }
    CHECK(n == 3);
    CHECK(header_fields == row_fields);

    auto edb = evolution_db();
    Constraints c;
    c.min_support = 0.8;
    c.max_gap = 1;
    c.min_items = 2;
    auto res = analysis::evolve(edb, 3, c);
    std::ostringstream out2;
    analysis::write_evolution(res, edb.alphabet, out2);
    std::istringstream lines2(out2.str());
    n = 0;
    while (std::getline(lines2, line)) {
        if (n == 0) {
            CHECK(line[0] == '#');
            CHECK(line.find("bin_mean_3") != std::string::npos);
        }
        ++n;
    }
    CHECK(n == res.rows.size() + 1);
}
