// Compares single-threaded and multi-threaded runs of the miner and the
// instance matrix on a synthetic database, checking that the outputs are
// identical while reporting wall times.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "seqmine/mine.hpp"
#include "seqmine/occurrence.hpp"

using namespace seqmine;
using Clock = std::chrono::steady_clock;

namespace {

SequenceDatabase synth_db(std::uint32_t seed, std::size_t n_seqs, std::size_t len,
                          std::size_t alphabet) {
    std::mt19937 rng(seed);
    SequenceDatabase db;
    std::vector<ItemId> ids;
    for (std::size_t a = 0; a < alphabet; ++a)
        ids.push_back(db.alphabet.intern("e" + std::to_string(a)));
    std::uniform_int_distribution<std::size_t> pick(0, alphabet - 1);
    std::bernoulli_distribution pair(0.15);
    for (std::size_t s = 0; s < n_seqs; ++s) {
        Sequence seq;
        seq.id = "s" + std::to_string(s);
        for (std::size_t k = 0; k < len; ++k) {
            std::vector<ItemId> e{ids[pick(rng)]};
            if (pair(rng)) e.push_back(ids[pick(rng)]);
            seq.itemsets.push_back(Itemset(std::move(e)));
        }
        db.sequences.push_back(std::move(seq));
    }
    return db;
}

double run_ms(int threads, const char* what, const std::function<void()>& fn) {
#ifdef _OPENMP
    omp_set_num_threads(threads);
#endif
    auto t0 = Clock::now();
    fn();
    auto ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    std::printf("%-18s %2d thread(s): %8.1f ms\n", what, threads, ms);
    return ms;
}

bool same(const std::vector<PatternStats>& a, const std::vector<PatternStats>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].pattern != b[i].pattern || a[i].support_count != b[i].support_count ||
            a[i].i_support_total != b[i].i_support_total || a[i].supporting != b[i].supporting)
            return false;
    return true;
}

}  // namespace

int main() {
    const auto db = synth_db(20240817, 400, 60, 12);
    Constraints c;
    c.min_support = 0.2;
    c.max_gap = 3;
    c.min_items = 2;
    c.max_items = 5;

    int max_threads = 1;
#ifdef _OPENMP
    max_threads = omp_get_max_threads();
#endif

    std::vector<PatternStats> serial, parallel;
    const double t1 = run_ms(1, "mine", [&] { serial = mine(db, c); });
    const double tn = run_ms(max_threads, "mine", [&] { parallel = mine(db, c); });
    if (!same(serial, parallel)) {
        std::printf("FAIL: mine results differ between thread counts\n");
        return 1;
    }
    std::printf("mine: %zu patterns, speedup x%.2f\n\n", serial.size(), t1 / tn);

    std::vector<Pattern> pats;
    for (const auto& ps : serial) pats.push_back(ps.pattern);
    std::vector<std::vector<std::uint32_t>> m1, mn;
    const double i1 = run_ms(1, "instance_matrix", [&] { m1 = instance_matrix(db, pats, c); });
    const double in = run_ms(max_threads, "instance_matrix", [&] { mn = instance_matrix(db, pats, c); });
    if (m1 != mn) {
        std::printf("FAIL: instance matrices differ between thread counts\n");
        return 1;
    }
    std::printf("instance_matrix: %zux%zu cells, speedup x%.2f\n", m1.size(), pats.size(),
                i1 / in);
    return 0;
}
