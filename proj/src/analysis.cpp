#include "seqmine/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include "seqmine/mine.hpp"
#include "seqmine/occurrence.hpp"

namespace seqmine::analysis {

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

std::string format_fixed6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<Pattern> candidate_union(std::vector<PatternStats> a, std::vector<PatternStats> b,
                                     const Alphabet& alphabet) {
    std::set<Pattern> seen;
    std::vector<PatternStats> merged;
    for (auto* src : {&a, &b})
        for (auto& ps : *src)
            if (seen.insert(ps.pattern).second) merged.push_back(std::move(ps));
    sort_canonical(merged, alphabet);
    std::vector<Pattern> out;
    out.reserve(merged.size());
    for (auto& ps : merged) out.push_back(std::move(ps.pattern));
    return out;
}

}  // namespace

std::vector<DifferentialRow> differential(const SequenceDatabase& db, const Constraints& c) {
    if (db.empty()) throw EmptyDatabase();
    c.validate();

    std::map<std::string, std::vector<std::uint32_t>> by_group;
    for (std::size_t i = 0; i < db.size(); ++i) {
        const auto& s = db.sequences[i];
        if (!s.group)
            throw NotTwoGroups("sequence '" + s.id + "' has no group label");
        by_group[*s.group].push_back(static_cast<std::uint32_t>(i));
    }
    if (by_group.size() != 2)
        throw NotTwoGroups("expected exactly 2 group labels, got " +
                           std::to_string(by_group.size()));

    auto it = by_group.begin();
    const std::string name_a = it->first;
    const auto& idx_a = it->second;
    ++it;
    const std::string name_b = it->first;
    const auto& idx_b = it->second;
    if (idx_a.size() < 2) throw GroupTooSmall(name_a);
    if (idx_b.size() < 2) throw GroupTooSmall(name_b);

    auto subset = [&](const std::vector<std::uint32_t>& idx) {
        SequenceDatabase sub;
        sub.alphabet = db.alphabet;
        for (auto i : idx) sub.sequences.push_back(db.sequences[i]);
        return sub;
    };
    const auto candidates = candidate_union(mine(subset(idx_a), c), mine(subset(idx_b), c),
                                            db.alphabet);

    std::vector<DifferentialRow> rows(candidates.size());
    const auto total = static_cast<std::int64_t>(candidates.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t ci = 0; ci < total; ++ci) {
        const Pattern& pat = candidates[static_cast<std::size_t>(ci)];
        DifferentialRow row;
        row.pattern = pat;

        auto summarize = [&](const std::string& name, const std::vector<std::uint32_t>& idx,
                             std::vector<double>& instances) {
            GroupSummary g;
            g.name = name;
            g.n = idx.size();
            instances.reserve(idx.size());
            for (auto i : idx) {
                const auto cnt = count_instances(db.sequences[i], pat, c);
                if (cnt > 0) ++g.support_count;
                instances.push_back(static_cast<double>(cnt));
            }
            g.f_support = static_cast<double>(g.support_count) / static_cast<double>(g.n);
            g.mean_instances = mean_of(instances);
            g.sd_instances = sample_sd(instances);
            return g;
        };
        std::vector<double> inst_a, inst_b;
        row.group_a = summarize(name_a, idx_a, inst_a);
        row.group_b = summarize(name_b, idx_b, inst_b);

        const std::uint64_t a_yes = row.group_a.support_count;
        const std::uint64_t a_no = row.group_a.n - row.group_a.support_count;
        const std::uint64_t b_yes = row.group_b.support_count;
        const std::uint64_t b_no = row.group_b.n - row.group_b.support_count;
        if (a_yes + b_yes == 0 || a_no + b_no == 0) {
            // containment is unanimous: no frequency difference to test
            stats::TestResult r;
            r.statistic = 0.0;
            r.df1 = 1.0;
            r.df2 = std::numeric_limits<double>::quiet_NaN();
            r.p_value = 1.0;
            r.effect_kind = stats::EffectKind::odds_ratio;
            r.effect = ((static_cast<double>(a_yes) + 0.5) * (static_cast<double>(b_no) + 0.5)) /
                       ((static_cast<double>(a_no) + 0.5) * (static_cast<double>(b_yes) + 0.5));
            row.support_test = r;
        } else {
            row.support_test = stats::chi_square_2x2({{{a_yes, a_no}, {b_yes, b_no}}});
        }
        row.instance_test = stats::welch_t_test(inst_a, inst_b);
        rows[static_cast<std::size_t>(ci)] = std::move(row);
    }

    std::vector<double> p_support, p_instance;
    p_support.reserve(rows.size());
    p_instance.reserve(rows.size());
    for (const auto& r : rows) {
        p_support.push_back(r.support_test.p_value);
        p_instance.push_back(r.instance_test.p_value);
    }
    const auto q_support = stats::bh_adjust(p_support);
    const auto q_instance = stats::bh_adjust(p_instance);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].q_support = q_support[i];
        rows[i].q_instance = q_instance[i];
    }

    std::stable_sort(rows.begin(), rows.end(), [](const DifferentialRow& x, const DifferentialRow& y) {
        return std::min(x.q_support, x.q_instance) < std::min(y.q_support, y.q_instance);
    });
    return rows;
}

namespace {

EvolutionResult build_evolution(const SequenceDatabase& db, const Constraints& c,
                                const std::vector<std::vector<Sequence>>& subject_bins,
                                std::vector<std::string> excluded, std::size_t n_bins) {
    EvolutionResult res;
    res.bins = n_bins;
    res.subjects = subject_bins.size();
    res.excluded = std::move(excluded);
    if (subject_bins.empty()) throw AllSequencesExcluded();

    auto mined = mine(db, c);
    res.rows.resize(mined.size());
    const auto total = static_cast<std::int64_t>(mined.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t ci = 0; ci < total; ++ci) {
        EvolutionRow row;
        row.pattern = mined[static_cast<std::size_t>(ci)].pattern;
        std::vector<std::vector<double>> matrix(subject_bins.size(),
                                                std::vector<double>(n_bins, 0.0));
        for (std::size_t s = 0; s < subject_bins.size(); ++s)
            for (std::size_t b = 0; b < n_bins; ++b)
                matrix[s][b] = static_cast<double>(
                    count_instances(subject_bins[s][b], row.pattern, c));
        row.bin_means.assign(n_bins, 0.0);
        for (std::size_t b = 0; b < n_bins; ++b) {
            double sum = 0.0;
            for (const auto& r : matrix) sum += r[b];
            row.bin_means[b] = sum / static_cast<double>(matrix.size());
        }
        row.eta_squared = stats::eta_squared_bins(matrix);
        row.anova = stats::repeated_anova(matrix);
        res.rows[static_cast<std::size_t>(ci)] = std::move(row);
    }

    std::stable_sort(res.rows.begin(), res.rows.end(),
                     [](const EvolutionRow& x, const EvolutionRow& y) {
                         return x.eta_squared > y.eta_squared;
                     });
    for (std::size_t i = 0; i < res.rows.size(); ++i) res.rows[i].rank = i + 1;
    return res;
}

}  // namespace

EvolutionResult evolve(const SequenceDatabase& db, std::size_t n_bins, const Constraints& c) {
    if (db.empty()) throw EmptyDatabase();
    c.validate();
    auto segs = preprocess::segment_bins(db, n_bins);

    std::vector<std::vector<Sequence>> subject_bins;
    const std::size_t kept = segs.bins.front().size();
    subject_bins.resize(kept);
    for (std::size_t s = 0; s < kept; ++s) {
        subject_bins[s].reserve(n_bins);
        for (std::size_t b = 0; b < n_bins; ++b)
            subject_bins[s].push_back(std::move(segs.bins[b].sequences[s]));
    }
    return build_evolution(db, c, subject_bins, std::move(segs.short_sequence_ids), n_bins);
}

EvolutionResult evolve_segmented(const SequenceDatabase& db, preprocess::SplitMode mode,
                                 std::int64_t session_gap_seconds, const Constraints& c) {
    if (db.empty()) throw EmptyDatabase();
    c.validate();
    auto per_parent = preprocess::split_segments(db, mode, session_gap_seconds);

    std::size_t n_bins = 0;
    for (const auto& segs : per_parent) n_bins = std::max(n_bins, segs.size());
    if (n_bins < 2) throw preprocess::TooFewBins();

    std::vector<std::vector<Sequence>> subject_bins;
    std::vector<std::string> excluded;
    for (std::size_t i = 0; i < per_parent.size(); ++i) {
        if (per_parent[i].size() == n_bins)
            subject_bins.push_back(std::move(per_parent[i]));
        else
            excluded.push_back(db.sequences[i].id);
    }
    return build_evolution(db, c, subject_bins, std::move(excluded), n_bins);
}

std::vector<PatternStats> filter_closed(const std::vector<PatternStats>& results) {
    std::vector<PatternStats> out;
    for (const auto& ps : results) {
        bool covered = false;
        for (const auto& other : results) {
            if (other.support_count == ps.support_count && other.pattern != ps.pattern &&
                pattern_contains(other.pattern, ps.pattern)) {
                covered = true;
                break;
            }
        }
        if (!covered) out.push_back(ps);
    }
    return out;
}

std::vector<PatternStats> filter_generators(const std::vector<PatternStats>& results,
                                            std::size_t db_size) {
    std::vector<PatternStats> out;
    for (const auto& ps : results) {
        bool covered = ps.support_count == db_size;  // the empty pattern is in everything
        if (!covered) {
            for (const auto& other : results) {
                if (other.support_count == ps.support_count && other.pattern != ps.pattern &&
                    pattern_contains(ps.pattern, other.pattern)) {
                    covered = true;
                    break;
                }
            }
        }
        if (!covered) out.push_back(ps);
    }
    return out;
}

RuleMetrics rule_metrics(const Pattern& pat, const SequenceDatabase& db, const Constraints& c) {
    if (pat.size() < 2) throw std::invalid_argument("rule_metrics needs at least 2 itemsets");
    Pattern head(std::vector<Itemset>(pat.itemsets.begin(), pat.itemsets.end() - 1));
    Pattern tail({pat.itemsets.back()});

    const double s = support(db, pat, c).fraction;
    const double sx = support(db, head, c).fraction;
    const double sy = support(db, tail, c).fraction;
    if (sx == 0.0 || sy == 0.0) throw ZeroComponentSupport();
    return RuleMetrics{s / (sx * sy), s / (sx + sy - s)};
}

void write_differential(const std::vector<DifferentialRow>& rows, const Alphabet& alphabet,
                        std::ostream& out) {
    out << "#pattern\tgroup_a\tn_a\tsupport_count_a\tf_support_a\tmean_instances_a\t"
           "sd_instances_a\tgroup_b\tn_b\tsupport_count_b\tf_support_b\tmean_instances_b\t"
           "sd_instances_b\tchi_square\tp_support\tq_support\todds_ratio\tt_statistic\t"
           "t_df\tp_instance\tq_instance\tcohens_d\n";
    for (const auto& r : rows) {
        out << canonical_render(r.pattern, alphabet);
        for (const GroupSummary* g : {&r.group_a, &r.group_b}) {
            out << '\t' << g->name << '\t' << g->n << '\t' << g->support_count << '\t'
                << format_fixed6(g->f_support) << '\t' << format_double(g->mean_instances)
                << '\t' << format_double(g->sd_instances);
        }
        out << '\t' << format_double(r.support_test.statistic) << '\t'
            << format_double(r.support_test.p_value) << '\t' << format_double(r.q_support)
            << '\t' << format_double(r.support_test.effect) << '\t'
            << format_double(r.instance_test.statistic) << '\t'
            << format_double(r.instance_test.df1) << '\t'
            << format_double(r.instance_test.p_value) << '\t' << format_double(r.q_instance)
            << '\t' << format_double(r.instance_test.effect) << '\n';
    }
}

void write_evolution(const EvolutionResult& result, const Alphabet& alphabet, std::ostream& out) {
    out << "#pattern\trank\teta_squared\tf_statistic\tdf_bins\tdf_error\tp_value\t"
           "partial_eta_squared";
    for (std::size_t b = 1; b <= result.bins; ++b) out << "\tbin_mean_" << b;
    out << '\n';
    for (const auto& r : result.rows) {
        out << canonical_render(r.pattern, alphabet) << '\t' << r.rank << '\t'
            << format_double(r.eta_squared) << '\t' << format_double(r.anova.statistic) << '\t'
            << format_double(r.anova.df1) << '\t' << format_double(r.anova.df2) << '\t'
            << format_double(r.anova.p_value) << '\t' << format_double(r.anova.effect);
        for (double m : r.bin_means) out << '\t' << format_double(m);
        out << '\n';
    }
}

}  // namespace seqmine::analysis
