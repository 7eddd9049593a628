// seqmine: constrained sequential pattern mining over categorical event
// logs. Subcommands: mine, preprocess, diff, evolve. Exit codes: 0 ok,
// 2 input error, 3 constraint error.

#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "seqmine/analysis.hpp"
#include "seqmine/io.hpp"
#include "seqmine/mine.hpp"
#include "seqmine/model.hpp"
#include "seqmine/occurrence.hpp"
#include "seqmine/preprocess.hpp"

namespace {

using namespace seqmine;

struct CommonOpts {
    std::string input;
    std::string format = "basket";
    std::optional<double> min_support;
    std::optional<std::size_t> min_count;
    std::string max_gap = "inf";
    std::string max_window = "inf";
    std::size_t min_items = 2;
    std::string max_items = "inf";
    std::string out;
    int threads = 0;
    std::uint64_t seed = 0;  // reserved for randomized extensions; unused
};

std::size_t parse_limit(const std::string& value, const char* flag) {
    if (value == "inf") return kUnlimited;
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size())
        throw InvalidConstraints(std::string(flag) + " must be a non-negative integer or 'inf'");
    return v;
}

Constraints build_constraints(const CommonOpts& o) {
    Constraints c;
    c.min_support = o.min_support;
    c.min_count = o.min_count;
    if (!c.min_support && !c.min_count) c.min_support = 0.5;
    c.max_gap = parse_limit(o.max_gap, "--max-gap");
    c.max_window = parse_limit(o.max_window, "--max-window");
    c.min_items = o.min_items;
    c.max_items = parse_limit(o.max_items, "--max-items");
    c.validate();
    return c;
}

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

SequenceDatabase load_db(const std::string& path, const std::string& format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
    return format == "table" ? io::parse_event_table(in) : io::parse_basket(in);
}

struct OutStream {
    std::ofstream file;
    std::ostream* os = nullptr;
};

OutStream open_out(const std::string& path) {
    OutStream o;
    if (path.empty() || path == "-") {
        o.os = &std::cout;
        return o;
    }
    o.file.open(path);
    if (!o.file) throw std::runtime_error("cannot open output file '" + path + "'");
    o.os = &o.file;
    return o;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_out_default_stdout) {
    cmd->add_option("--input", o.input, "input file")->required();
    cmd->add_option("--format", o.format, "input format")
        ->check(CLI::IsMember({"basket", "table"}));
    cmd->add_option("--min-support", o.min_support, "minimum support fraction in (0,1]");
    cmd->add_option("--min-count", o.min_count, "minimum supporting-sequence count");
    cmd->add_option("--max-gap", o.max_gap, "max positions between consecutive elements (N or inf)");
    cmd->add_option("--max-window", o.max_window, "max last-minus-first position span (N or inf)");
    cmd->add_option("--min-items", o.min_items, "minimum total items per pattern");
    cmd->add_option("--max-items", o.max_items, "maximum total items per pattern (N or inf)");
    if (with_out_default_stdout)
        cmd->add_option("--out", o.out, "output path (default: standard output)");
    cmd->add_option("--threads", o.threads, "worker thread count (default: library choice)");
    cmd->add_option("--seed", o.seed, "random seed for randomized extensions (unused by mining)");
}

int cmd_mine(const CommonOpts& o, bool closed, bool generators, bool instances) {
    apply_threads(o.threads);
    if (closed && generators)
        throw InvalidConstraints("--closed and --generators are mutually exclusive");
    if (instances && (o.out.empty() || o.out == "-"))
        throw std::runtime_error("--instances requires --out (matrix goes to <out>.instances.csv)");

    Constraints c = build_constraints(o);
    SequenceDatabase db = load_db(o.input, o.format);

    std::vector<PatternStats> results;
    if (generators) {
        // generator status depends on sub-patterns below the item floor,
        // so mine the complete set first and trim afterwards
        Constraints full = c;
        full.min_items = 1;
        results = analysis::filter_generators(mine(db, full), db.size());
        std::erase_if(results,
                      [&](const PatternStats& ps) { return ps.pattern.item_count() < c.min_items; });
    } else {
        results = mine(db, c);
        if (closed) results = analysis::filter_closed(results);
    }

    auto out = open_out(o.out);
    io::write_patterns(results, db.alphabet, *out.os);

    if (instances) {
        std::vector<Pattern> pats;
        pats.reserve(results.size());
        for (const auto& ps : results) pats.push_back(ps.pattern);
        auto matrix = instance_matrix(db, pats, c);
        auto mout = open_out(o.out + ".instances.csv");
        io::write_instance_matrix(db, pats, matrix, *mout.os);
    }
    return 0;
}

struct TransformOp {
    std::string kind;
    std::string value;
};

// preprocess transforms apply in command-line order, which CLI11 does
// not preserve across distinct flags, so recover it from argv
std::vector<TransformOp> transform_order(int argc, char** argv) {
    static const std::map<std::string, std::string> kinds = {
        {"--filter", "filter"},   {"--collapse", "collapse"}, {"--context", "context"},
        {"--abstract", "abstract"}, {"--segment", "segment"},
    };
    std::vector<TransformOp> ops;
    for (int i = 0; i < argc; ++i) {
        std::string arg = argv[i];
        std::string name = arg, value;
        bool inline_value = false;
        if (auto eq = arg.find('='); eq != std::string::npos) {
            name = arg.substr(0, eq);
            value = arg.substr(eq + 1);
            inline_value = true;
        }
        auto it = kinds.find(name);
        if (it == kinds.end()) continue;
        if (!inline_value && i + 1 < argc) value = argv[i + 1];
        ops.push_back({it->second, value});
    }
    return ops;
}

std::set<std::string> comma_set(const std::string& csv) {
    std::set<std::string> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.insert(tok);
    }
    return out;
}

int cmd_preprocess(const CommonOpts& o, const std::vector<TransformOp>& ops) {
    apply_threads(o.threads);
    SequenceDatabase db = load_db(o.input, o.format);

    auto write_db = [&](const SequenceDatabase& d, const std::string& path) {
        auto out = open_out(path);
        if (o.format == "table")
            io::write_event_table(d, *out.os);
        else
            io::write_basket(d, *out.os);
    };

    for (std::size_t i = 0; i < ops.size(); ++i) {
        const auto& op = ops[i];
        if (op.kind == "filter") {
            db = preprocess::filter_events(db, comma_set(op.value));
        } else if (op.kind == "collapse") {
            std::optional<std::set<std::string>> targets;
            if (op.value != "all") targets = comma_set(op.value);
            db = preprocess::collapse_runs(db, targets);
        } else if (op.kind == "context") {
            std::ifstream rf(op.value);
            if (!rf) throw std::runtime_error("cannot open rule file '" + op.value + "'");
            for (const auto& rule : preprocess::parse_context_rules(rf))
                db = preprocess::contextualize(db, rule);
        } else if (op.kind == "abstract") {
            std::ifstream rf(op.value);
            if (!rf) throw std::runtime_error("cannot open rule file '" + op.value + "'");
            db = preprocess::abstract_rewrite(db, preprocess::parse_rewrite_rules(rf));
        } else if (op.kind == "segment") {
            if (op.value == "by-actor") {
                db = preprocess::split_sequences(db, preprocess::SplitMode::by_actor);
            } else if (op.value == "by-day") {
                db = preprocess::split_sequences(db, preprocess::SplitMode::by_day);
            } else if (op.value.rfind("by-session:", 0) == 0) {
                std::int64_t gap = 0;
                const std::string secs = op.value.substr(11);
                auto [p, ec] = std::from_chars(secs.data(), secs.data() + secs.size(), gap);
                if (ec != std::errc() || p != secs.data() + secs.size() || gap < 0)
                    throw std::runtime_error("--segment by-session needs a non-negative gap in seconds");
                db = preprocess::split_sequences(db, preprocess::SplitMode::by_session, gap);
            } else if (op.value.rfind("bins:", 0) == 0) {
                if (i + 1 != ops.size())
                    throw std::runtime_error("--segment bins:N must be the last transform");
                std::size_t n = 0;
                const std::string num = op.value.substr(5);
                auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), n);
                if (ec != std::errc() || p != num.data() + num.size())
                    throw InvalidConstraints("--segment bins:N needs an integer bin count");
                auto segs = preprocess::segment_bins(db, n);
                if (!segs.short_sequence_ids.empty())
                    std::cerr << "note: excluded " << segs.short_sequence_ids.size()
                              << " sequence(s) shorter than the bin count\n";
                for (std::size_t b = 0; b < segs.bins.size(); ++b)
                    write_db(segs.bins[b], o.out + ".bin" + std::to_string(b + 1));
                return 0;
            } else {
                throw std::runtime_error("unknown --segment mode '" + op.value + "'");
            }
        }
    }
    write_db(db, o.out);
    return 0;
}

int cmd_diff(const CommonOpts& o) {
    apply_threads(o.threads);
    if (o.format != "table")
        throw std::runtime_error("diff requires --format table (needs a group column)");
    Constraints c = build_constraints(o);
    SequenceDatabase db = load_db(o.input, o.format);

    auto rows = analysis::differential(db, c);
    auto out = open_out(o.out);
    analysis::write_differential(rows, db.alphabet, *out.os);

    std::size_t significant = 0;
    for (const auto& r : rows)
        if (std::min(r.q_support, r.q_instance) < 0.05) ++significant;
    std::cout << "patterns tested: " << rows.size() << "; q < 0.05: " << significant << "\n";
    return 0;
}

int cmd_evolve(const CommonOpts& o, const std::string& bins, const std::string& segment) {
    apply_threads(o.threads);
    if (bins.empty() == segment.empty())
        throw std::runtime_error("evolve needs exactly one of --bins N or --segment MODE");
    Constraints c = build_constraints(o);
    SequenceDatabase db = load_db(o.input, o.format);

    analysis::EvolutionResult res;
    if (!bins.empty()) {
        std::size_t n = 0;
        auto [p, ec] = std::from_chars(bins.data(), bins.data() + bins.size(), n);
        if (ec != std::errc() || p != bins.data() + bins.size())
            throw InvalidConstraints("--bins needs an integer bin count");
        res = analysis::evolve(db, n, c);
    } else if (segment == "by-day") {
        res = analysis::evolve_segmented(db, preprocess::SplitMode::by_day, 0, c);
    } else if (segment.rfind("by-session:", 0) == 0) {
        std::int64_t gap = 0;
        const std::string secs = segment.substr(11);
        auto [p, ec] = std::from_chars(secs.data(), secs.data() + secs.size(), gap);
        if (ec != std::errc() || p != secs.data() + secs.size() || gap < 0)
            throw std::runtime_error("--segment by-session needs a non-negative gap in seconds");
        res = analysis::evolve_segmented(db, preprocess::SplitMode::by_session, gap, c);
    } else {
        throw std::runtime_error("unknown --segment mode '" + segment + "'");
    }

    auto out = open_out(o.out);
    analysis::write_evolution(res, db.alphabet, *out.os);

    std::vector<double> ps;
    ps.reserve(res.rows.size());
    for (const auto& r : res.rows) ps.push_back(r.anova.p_value);
    const auto qs = stats::bh_adjust(ps);
    std::size_t significant = 0;
    for (double q : qs)
        if (q < 0.05) ++significant;
    if (!res.excluded.empty())
        std::cerr << "note: excluded " << res.excluded.size()
                  << " sequence(s) shorter than the bin count\n";
    std::cout << "patterns tested: " << res.rows.size() << "; q < 0.05: " << significant << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"constrained sequential pattern mining toolkit"};
    app.require_subcommand(1);

    CommonOpts mine_opts;
    bool closed = false, generators = false, instances = false;
    auto* mine_cmd = app.add_subcommand("mine", "mine frequent patterns");
    add_common(mine_cmd, mine_opts, true);
    mine_cmd->add_flag("--closed", closed, "keep only closed patterns");
    mine_cmd->add_flag("--generators", generators, "keep only generator patterns");
    mine_cmd->add_flag("--instances", instances, "also write the instance matrix");

    CommonOpts pre_opts;
    std::vector<std::string> flag_sink;  // values recovered from argv for ordering
    auto* pre_cmd = app.add_subcommand("preprocess", "transform an event log");
    pre_cmd->add_option("--input", pre_opts.input, "input file")->required();
    pre_cmd->add_option("--format", pre_opts.format, "input and output format")
        ->check(CLI::IsMember({"basket", "table"}));
    pre_cmd->add_option("--out", pre_opts.out, "output path")->required();
    pre_cmd->add_option("--threads", pre_opts.threads, "worker thread count");
    pre_cmd->add_option("--seed", pre_opts.seed, "random seed (unused)");
    pre_cmd->add_option("--filter", flag_sink, "comma-separated labels to drop");
    pre_cmd->add_option("--collapse", flag_sink, "labels to collapse runs of, or 'all'");
    pre_cmd->add_option("--context", flag_sink, "context rule file");
    pre_cmd->add_option("--abstract", flag_sink, "rewrite rule file");
    pre_cmd->add_option("--segment", flag_sink,
                        "by-actor | by-day | by-session:SECONDS | bins:N");

    CommonOpts diff_opts;
    auto* diff_cmd = app.add_subcommand("diff", "two-group differential pattern analysis");
    add_common(diff_cmd, diff_opts, true);

    CommonOpts evo_opts;
    std::string evo_bins, evo_segment;
    auto* evo_cmd = app.add_subcommand("evolve", "temporal-evolution pattern ranking");
    add_common(evo_cmd, evo_opts, true);
    evo_cmd->add_option("--bins", evo_bins, "number of equal bins per sequence");
    evo_cmd->add_option("--segment", evo_segment, "by-day | by-session:SECONDS");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (mine_cmd->parsed()) return cmd_mine(mine_opts, closed, generators, instances);
        if (pre_cmd->parsed()) return cmd_preprocess(pre_opts, transform_order(argc, argv));
        if (diff_cmd->parsed()) return cmd_diff(diff_opts);
        if (evo_cmd->parsed()) return cmd_evolve(evo_opts, evo_bins, evo_segment);
    } catch (const InvalidConstraints& e) {
        std::cerr << "constraint error: " << e.what() << "\n";
        return 3;
    } catch (const preprocess::TooFewBins& e) {
        std::cerr << "constraint error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
