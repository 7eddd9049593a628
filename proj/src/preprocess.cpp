#include "seqmine/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>

namespace seqmine::preprocess {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Label-space working form: transforms edit labels and rebuild ids only
// at the end, so id compaction never leaks into the transform logic.
struct RawEvent {
    std::vector<std::string> labels;
    EventMeta meta;
};

struct RawSeq {
    std::string id;
    std::optional<std::string> group;
    std::vector<RawEvent> events;
};

std::vector<RawSeq> to_raw(const SequenceDatabase& db) {
    std::vector<RawSeq> rows;
    rows.reserve(db.size());
    for (const auto& s : db.sequences) {
        RawSeq r{s.id, s.group, {}};
        r.events.reserve(s.length());
        for (std::size_t k = 0; k < s.length(); ++k) {
            RawEvent ev;
            for (ItemId id : s.itemsets[k].items) ev.labels.push_back(db.alphabet.label(id));
            if (const EventMeta* m = s.meta_at(k)) ev.meta = *m;
            r.events.push_back(std::move(ev));
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

SequenceDatabase from_raw(std::vector<RawSeq> rows, bool with_meta) {
    SequenceDatabase db;
    for (auto& r : rows) {
        Sequence s;
        s.id = std::move(r.id);
        s.group = std::move(r.group);
        for (auto& ev : r.events) {
            std::vector<ItemId> ids;
            ids.reserve(ev.labels.size());
            for (const auto& label : ev.labels) ids.push_back(db.alphabet.intern(label));
            s.itemsets.push_back(Itemset(std::move(ids)));
            if (with_meta) s.meta.push_back(std::move(ev.meta));
        }
        db.sequences.push_back(std::move(s));
    }
    return db;
}

bool any_meta(const SequenceDatabase& db) {
    for (const auto& s : db.sequences)
        if (s.has_meta()) return true;
    return false;
}

void require_single_item(const SequenceDatabase& db, const char* op) {
    for (const auto& s : db.sequences)
        for (const auto& is : s.itemsets)
            if (is.size() > 1)
                throw MultiItemEvent(std::string(op) + " requires single-item events (sequence '" +
                                     s.id + "')");
}

}  // namespace

SequenceDatabase filter_events(const SequenceDatabase& db, const std::set<std::string>& excluded) {
    auto rows = to_raw(db);
    for (auto& r : rows) {
        std::vector<RawEvent> kept;
        for (auto& ev : r.events) {
            std::erase_if(ev.labels, [&](const std::string& l) { return excluded.count(l) > 0; });
            if (!ev.labels.empty()) kept.push_back(std::move(ev));
        }
        r.events = std::move(kept);
    }
    return from_raw(std::move(rows), any_meta(db));
}

SequenceDatabase collapse_runs(const SequenceDatabase& db,
                               const std::optional<std::set<std::string>>& targets,
                               const std::string& suffix) {
    require_single_item(db, "collapse_runs");
    auto rows = to_raw(db);
    for (auto& r : rows) {
        std::vector<RawEvent> out;
        std::size_t i = 0;
        while (i < r.events.size()) {
            const std::string label = r.events[i].labels[0];
            std::size_t j = i + 1;
            while (j < r.events.size() && r.events[j].labels[0] == label) ++j;
            bool collapse = j - i >= 2 && (!targets || targets->count(label) > 0);
            if (!collapse) {
                for (std::size_t k = i; k < j; ++k) out.push_back(std::move(r.events[k]));
            } else {
                double dur = 0.0;
                bool has_dur = false;
                for (std::size_t k = i; k < j; ++k) {
                    if (r.events[k].meta.duration) {
                        dur += *r.events[k].meta.duration;
                        has_dur = true;
                    }
                }
                RawEvent ev = std::move(r.events[i]);
                ev.labels[0] = label + suffix;
                if (has_dur) ev.meta.duration = dur;
                out.push_back(std::move(ev));
            }
            i = j;
        }
        r.events = std::move(out);
    }
    return from_raw(std::move(rows), any_meta(db));
}

SequenceDatabase contextualize(const SequenceDatabase& db, const ContextRule& rule) {
    auto rows = to_raw(db);
    for (auto& r : rows) {
        for (auto& ev : r.events) {
            auto v = ev.meta.attribute(rule.attribute);
            if (!v)
                throw MissingAttribute("event '" + ev.labels[0] + "' in sequence '" + r.id +
                                       "' lacks attribute '" + rule.attribute + "'");
            const std::string& sfx = *v > rule.threshold ? rule.high_suffix : rule.low_suffix;
            for (auto& label : ev.labels) label += sfx;
        }
    }
    return from_raw(std::move(rows), any_meta(db));
}

SequenceDatabase abstract_rewrite(const SequenceDatabase& db,
                                  const std::vector<RewriteRule>& rules) {
    require_single_item(db, "abstract_rewrite");
    std::vector<const RewriteRule*> ordered;
    ordered.reserve(rules.size());
    for (const auto& r : rules) {
        if (r.lhs.empty()) throw BadRuleSyntax("rewrite rule with empty left-hand side");
        ordered.push_back(&r);
    }
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const RewriteRule* a, const RewriteRule* b) {
                         return a->lhs.size() > b->lhs.size();
                     });

    auto rows = to_raw(db);
    for (auto& r : rows) {
        std::vector<RawEvent> out;
        std::size_t i = 0;
        while (i < r.events.size()) {
            const RewriteRule* hit = nullptr;
            for (const RewriteRule* rule : ordered) {
                if (i + rule->lhs.size() > r.events.size()) continue;
                bool match = true;
                for (std::size_t k = 0; k < rule->lhs.size(); ++k) {
                    if (r.events[i + k].labels[0] != rule->lhs[k]) {
                        match = false;
                        break;
                    }
                }
                if (match) {
                    hit = rule;
                    break;
                }
            }
            if (!hit) {
                out.push_back(std::move(r.events[i]));
                ++i;
                continue;
            }
            double dur = 0.0;
            bool has_dur = false;
            for (std::size_t k = 0; k < hit->lhs.size(); ++k) {
                if (r.events[i + k].meta.duration) {
                    dur += *r.events[i + k].meta.duration;
                    has_dur = true;
                }
            }
            RawEvent ev = std::move(r.events[i]);
            ev.labels[0] = hit->rhs;
            if (has_dur) ev.meta.duration = dur;
            out.push_back(std::move(ev));
            i += hit->lhs.size();
        }
        r.events = std::move(out);
    }
    return from_raw(std::move(rows), any_meta(db));
}

std::vector<std::vector<Sequence>> split_segments(const SequenceDatabase& db, SplitMode mode,
                                                  std::int64_t session_gap_seconds) {
    std::vector<std::vector<Sequence>> out;
    out.reserve(db.size());

    auto child = [](const Sequence& s, const std::string& id_suffix,
                    const std::vector<std::size_t>& positions) {
        Sequence c;
        c.id = s.id + id_suffix;
        c.group = s.group;
        for (std::size_t k : positions) {
            c.itemsets.push_back(s.itemsets[k]);
            if (s.has_meta()) c.meta.push_back(s.meta[k]);
        }
        return c;
    };

    for (const auto& s : db.sequences) {
        const std::size_t n = s.length();
        auto& children = out.emplace_back();
        if (n == 0) continue;

        if (mode == SplitMode::by_actor) {
            std::vector<std::string> order;
            std::map<std::string, std::vector<std::size_t>> parts;
            for (std::size_t k = 0; k < n; ++k) {
                const EventMeta* m = s.meta_at(k);
                std::string actor = m && m->actor ? *m->actor : std::string();
                if (parts.find(actor) == parts.end()) order.push_back(actor);
                parts[actor].push_back(k);
            }
            for (const auto& actor : order) children.push_back(child(s, ":" + actor, parts[actor]));
            continue;
        }

        std::vector<std::int64_t> ts(n);
        for (std::size_t k = 0; k < n; ++k) {
            const EventMeta* m = s.meta_at(k);
            if (!m || !m->timestamp) throw MissingTimestamp(s.id);
            ts[k] = *m->timestamp;
        }

        std::vector<std::size_t> current{0};
        std::size_t child_no = 1;
        const char tag = mode == SplitMode::by_day ? 'd' : 's';
        auto boundary = [&](std::size_t k) {
            if (mode == SplitMode::by_day) {
                auto day = [](std::int64_t t) {
                    return t >= 0 ? t / 86400 : (t - 86399) / 86400;
                };
                return day(ts[k]) != day(ts[k - 1]);
            }
            return ts[k] - ts[k - 1] > session_gap_seconds;
        };
        for (std::size_t k = 1; k < n; ++k) {
            if (boundary(k)) {
                children.push_back(child(s, ":" + std::string(1, tag) + std::to_string(child_no), current));
                ++child_no;
                current.clear();
            }
            current.push_back(k);
        }
        children.push_back(child(s, ":" + std::string(1, tag) + std::to_string(child_no), current));
    }
    return out;
}

SequenceDatabase split_sequences(const SequenceDatabase& db, SplitMode mode,
                                 std::int64_t session_gap_seconds) {
    SequenceDatabase out;
    out.alphabet = db.alphabet;
    for (auto& children : split_segments(db, mode, session_gap_seconds))
        for (auto& c : children) out.sequences.push_back(std::move(c));
    return out;
}

BinSegments segment_bins(const SequenceDatabase& db, std::size_t n_bins) {
    if (n_bins < 2) throw TooFewBins();
    BinSegments out;
    out.bins.resize(n_bins);
    for (auto& b : out.bins) b.alphabet = db.alphabet;

    for (const auto& s : db.sequences) {
        const std::size_t n = s.length();
        if (n < n_bins) {
            out.short_sequence_ids.push_back(s.id);
            continue;
        }
        const std::size_t q = n / n_bins, r = n % n_bins;
        std::size_t start = 0;
        for (std::size_t k = 0; k < n_bins; ++k) {
            const std::size_t len = q + (k < r ? 1 : 0);
            Sequence c;
            c.id = s.id;
            c.group = s.group;
            for (std::size_t p = start; p < start + len; ++p) {
                c.itemsets.push_back(s.itemsets[p]);
                if (s.has_meta()) c.meta.push_back(s.meta[p]);
            }
            out.bins[k].sequences.push_back(std::move(c));
            start += len;
        }
    }
    return out;
}

std::vector<RewriteRule> parse_rewrite_rules(std::istream& in) {
    std::vector<RewriteRule> rules;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        auto arrow = body.find("->");
        if (arrow == std::string_view::npos)
            throw BadRuleSyntax("line " + std::to_string(line_no) + ": missing '->'");
        auto lhs = trim(body.substr(0, arrow));
        auto rhs = trim(body.substr(arrow + 2));
        if (lhs.empty() || rhs.empty())
            throw BadRuleSyntax("line " + std::to_string(line_no) + ": empty rule side");
        RewriteRule rule;
        rule.rhs = std::string(rhs);
        std::size_t start = 0;
        while (start <= lhs.size()) {
            auto bar = lhs.find('|', start);
            auto tok = trim(bar == std::string_view::npos ? lhs.substr(start)
                                                          : lhs.substr(start, bar - start));
            if (tok.empty())
                throw BadRuleSyntax("line " + std::to_string(line_no) + ": empty label in rule");
            rule.lhs.emplace_back(tok);
            if (bar == std::string_view::npos) break;
            start = bar + 1;
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::vector<ContextRule> parse_context_rules(std::istream& in) {
    std::vector<ContextRule> rules;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (start <= body.size()) {
            auto comma = body.find(',', start);
            fields.emplace_back(trim(comma == std::string_view::npos
                                         ? body.substr(start)
                                         : body.substr(start, comma - start)));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 4)
            throw BadRuleSyntax("line " + std::to_string(line_no) +
                                ": expected attribute,threshold,low_suffix,high_suffix");
        ContextRule rule;
        rule.attribute = fields[0];
        try {
            std::size_t used = 0;
            rule.threshold = std::stod(fields[1], &used);
            if (used != fields[1].size()) throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw BadRuleSyntax("line " + std::to_string(line_no) + ": threshold is not a number");
        }
        if (rule.attribute.empty() || fields[2].empty() || fields[3].empty())
            throw BadRuleSyntax("line " + std::to_string(line_no) + ": empty rule field");
        rule.low_suffix = fields[2];
        rule.high_suffix = fields[3];
        rules.push_back(std::move(rule));
    }
    return rules;
}

}  // namespace seqmine::preprocess
