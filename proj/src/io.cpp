#include "seqmine/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string_view>

namespace seqmine::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool blank(std::string_view s) { return trim(s).empty(); }

std::optional<std::int64_t> to_int(std::string_view s) {
    s = trim(s);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

// One CSV record with quoted fields and doubled-quote escapes.
std::vector<std::string> split_csv(std::string_view line, std::size_t line_no) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (i <= line.size()) {
        if (i == line.size()) {
            if (quoted) throw MalformedLine(line_no, "unterminated quoted field");
            out.push_back(field);
            break;
        }
        char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    i += 2;
                } else {
                    quoted = false;
                    ++i;
                }
            } else {
                field += ch;
                ++i;
            }
        } else if (ch == '"' && field.empty()) {
            quoted = true;
            ++i;
        } else if (ch == ',') {
            out.push_back(field);
            field.clear();
            ++i;
        } else {
            field += ch;
            ++i;
        }
    }
    return out;
}

std::string csv_escape(std::string_view field) {
    bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs) return std::string(field);
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

struct RawEvent {
    std::int64_t event_id;
    std::size_t line;
    Itemset itemset;
    EventMeta meta;
};

SequenceDatabase assemble(Alphabet alphabet, std::vector<std::string>& seq_order,
                          std::map<std::string, std::vector<RawEvent>>& by_seq,
                          std::map<std::string, std::string>& groups, bool with_meta) {
    SequenceDatabase db;
    db.alphabet = std::move(alphabet);
    for (const auto& id : seq_order) {
        auto& events = by_seq[id];
        std::stable_sort(events.begin(), events.end(),
                         [](const RawEvent& a, const RawEvent& b) { return a.event_id < b.event_id; });
        for (std::size_t i = 1; i < events.size(); ++i) {
            if (events[i].event_id == events[i - 1].event_id)
                throw DuplicateEventId(events[i].line,
                                       "duplicate event_id " + std::to_string(events[i].event_id) +
                                           " in sequence '" + id + "'");
            if (events[i].meta.timestamp && events[i - 1].meta.timestamp &&
                *events[i].meta.timestamp < *events[i - 1].meta.timestamp)
                throw TimestampOrder(events[i].line, "timestamps decrease within sequence '" + id + "'");
        }
        Sequence s;
        s.id = id;
        for (auto& ev : events) {
            s.itemsets.push_back(std::move(ev.itemset));
            if (with_meta) s.meta.push_back(std::move(ev.meta));
        }
        if (auto it = groups.find(id); it != groups.end()) s.group = it->second;
        db.sequences.push_back(std::move(s));
    }
    return db;
}

}  // namespace

SequenceDatabase parse_basket(std::istream& in, char delimiter) {
    Alphabet alphabet;
    std::vector<std::string> seq_order;
    std::map<std::string, std::vector<RawEvent>> by_seq;
    std::map<std::string, std::string> groups;

    std::string line;
    std::size_t line_no = 0;
    while (next_line(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        auto fields = split(line, delimiter);
        if (fields.size() != 3)
            throw MalformedLine(line_no, "expected 3 fields, got " + std::to_string(fields.size()));
        std::string id(trim(fields[0]));
        if (id.empty()) throw MalformedLine(line_no, "empty sequence_id");
        auto event_id = to_int(fields[1]);
        if (!event_id)
            throw NonIntegerEventId(line_no, "event_id '" + std::string(trim(fields[1])) +
                                                 "' is not an integer");
        std::vector<ItemId> ids;
        for (auto label : split(fields[2], ',')) {
            label = trim(label);
            if (label.empty()) throw MalformedLine(line_no, "empty item label");
            ids.push_back(alphabet.intern(label));
        }
        if (ids.empty()) throw MalformedLine(line_no, "empty itemset");
        if (by_seq.find(id) == by_seq.end()) seq_order.push_back(id);
        by_seq[id].push_back(RawEvent{*event_id, line_no, Itemset(std::move(ids)), {}});
    }
    return assemble(std::move(alphabet), seq_order, by_seq, groups, false);
}

SequenceDatabase parse_event_table(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!next_line(in, line)) throw MalformedLine(1, "missing header row");
    ++line_no;

    auto header = split_csv(line, line_no);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[std::string(trim(header[i]))] = i;
    for (const char* req : {"sequence_id", "event_id", "label"})
        if (col.find(req) == col.end()) throw MissingColumn(req);

    auto lookup = [&](const char* name) -> std::optional<std::size_t> {
        auto it = col.find(name);
        if (it == col.end()) return std::nullopt;
        return it->second;
    };
    const auto c_seq = col["sequence_id"], c_event = col["event_id"], c_label = col["label"];
    const auto c_ts = lookup("timestamp"), c_dur = lookup("duration");
    const auto c_actor = lookup("actor"), c_group = lookup("group");
    std::vector<std::pair<std::string, std::size_t>> numeric_cols;
    for (const auto& [name, idx] : col)
        if (name != "sequence_id" && name != "event_id" && name != "label" &&
            name != "timestamp" && name != "duration" && name != "actor" && name != "group")
            numeric_cols.emplace_back(name, idx);

    Alphabet alphabet;
    std::vector<std::string> seq_order;
    std::map<std::string, std::vector<RawEvent>> by_seq;
    std::map<std::string, std::string> groups;

    while (next_line(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        auto fields = split_csv(line, line_no);
        if (fields.size() != header.size())
            throw MalformedLine(line_no, "expected " + std::to_string(header.size()) +
                                             " fields, got " + std::to_string(fields.size()));
        std::string id(trim(fields[c_seq]));
        if (id.empty()) throw MalformedLine(line_no, "empty sequence_id");
        auto event_id = to_int(fields[c_event]);
        if (!event_id)
            throw NonIntegerEventId(line_no, "event_id '" + std::string(trim(fields[c_event])) +
                                                 "' is not an integer");

        std::vector<ItemId> ids;
        for (auto label : split(std::string_view(fields[c_label]), ',')) {
            label = trim(label);
            if (label.empty()) throw MalformedLine(line_no, "empty item label");
            ids.push_back(alphabet.intern(label));
        }
        if (ids.empty()) throw MalformedLine(line_no, "empty itemset");

        EventMeta meta;
        if (c_ts && !blank(fields[*c_ts])) {
            auto v = to_int(fields[*c_ts]);
            if (!v) throw MalformedLine(line_no, "timestamp is not an integer");
            meta.timestamp = *v;
        }
        if (c_dur && !blank(fields[*c_dur])) {
            auto v = to_double(fields[*c_dur]);
            if (!v || *v < 0.0) throw MalformedLine(line_no, "duration is not a non-negative number");
            meta.duration = *v;
        }
        if (c_actor && !blank(fields[*c_actor])) meta.actor = std::string(trim(fields[*c_actor]));
        for (const auto& [name, idx] : numeric_cols) {
            if (blank(fields[idx])) continue;
            auto v = to_double(fields[idx]);
            if (!v) throw MalformedLine(line_no, "column '" + name + "' is not numeric");
            meta.numeric[name] = *v;
        }
        if (c_group && !blank(fields[*c_group])) {
            std::string g(trim(fields[*c_group]));
            auto [it, fresh] = groups.try_emplace(id, g);
            if (!fresh && it->second != g) throw InconsistentGroup(id);
        }

        if (by_seq.find(id) == by_seq.end()) seq_order.push_back(id);
        by_seq[id].push_back(RawEvent{*event_id, line_no, Itemset(std::move(ids)), std::move(meta)});
    }
    return assemble(std::move(alphabet), seq_order, by_seq, groups, true);
}

void write_basket(const SequenceDatabase& db, std::ostream& out, char delimiter) {
    for (const auto& s : db.sequences) {
        for (std::size_t k = 0; k < s.length(); ++k) {
            std::vector<std::string> labels;
            for (ItemId id : s.itemsets[k].items) labels.push_back(db.alphabet.label(id));
            std::sort(labels.begin(), labels.end());
            out << s.id << delimiter << (k + 1) << delimiter;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                if (i > 0) out << ',';
                out << labels[i];
            }
            out << '\n';
        }
    }
}

void write_event_table(const SequenceDatabase& db, std::ostream& out) {
    bool any_ts = false, any_dur = false, any_actor = false, any_group = false;
    std::set<std::string> numeric_names;
    for (const auto& s : db.sequences) {
        if (s.group) any_group = true;
        for (std::size_t k = 0; k < s.length(); ++k) {
            const EventMeta* m = s.meta_at(k);
            if (!m) continue;
            any_ts |= m->timestamp.has_value();
            any_dur |= m->duration.has_value();
            any_actor |= m->actor.has_value();
            for (const auto& [name, v] : m->numeric) numeric_names.insert(name);
        }
    }

    out << "sequence_id,event_id,label";
    if (any_ts) out << ",timestamp";
    if (any_dur) out << ",duration";
    if (any_actor) out << ",actor";
    if (any_group) out << ",group";
    for (const auto& name : numeric_names) out << ',' << csv_escape(name);
    out << '\n';

    for (const auto& s : db.sequences) {
        for (std::size_t k = 0; k < s.length(); ++k) {
            std::vector<std::string> labels;
            for (ItemId id : s.itemsets[k].items) labels.push_back(db.alphabet.label(id));
            std::sort(labels.begin(), labels.end());
            std::string joined;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                if (i > 0) joined += ',';
                joined += labels[i];
            }
            out << csv_escape(s.id) << ',' << (k + 1) << ',' << csv_escape(joined);
            const EventMeta* m = s.meta_at(k);
            if (any_ts) {
                out << ',';
                if (m && m->timestamp) out << *m->timestamp;
            }
            if (any_dur) {
                out << ',';
                if (m && m->duration) out << format_double(*m->duration);
            }
            if (any_actor) {
                out << ',';
                if (m && m->actor) out << csv_escape(*m->actor);
            }
            if (any_group) {
                out << ',';
                if (s.group) out << csv_escape(*s.group);
            }
            for (const auto& name : numeric_names) {
                out << ',';
                if (m) {
                    auto it = m->numeric.find(name);
                    if (it != m->numeric.end()) out << format_double(it->second);
                }
            }
            out << '\n';
        }
    }
}

void write_patterns(const std::vector<PatternStats>& results, const Alphabet& alphabet,
                    std::ostream& out) {
    std::vector<PatternStats> sorted = results;
    sort_canonical(sorted, alphabet);
    out << "pattern\tsupport_count\tf_support\ti_support_total\n";
    char buf[32];
    for (const auto& ps : sorted) {
        std::snprintf(buf, sizeof buf, "%.6f", ps.f_support);
        out << canonical_render(ps.pattern, alphabet) << '\t' << ps.support_count << '\t' << buf
            << '\t' << ps.i_support_total << '\n';
    }
}

void write_instance_matrix(const SequenceDatabase& db, const std::vector<Pattern>& patterns,
                           const std::vector<std::vector<std::uint32_t>>& matrix,
                           std::ostream& out) {
    if (matrix.size() != db.size())
        throw DimensionMismatch("matrix row count does not match database size");
    for (const auto& row : matrix)
        if (row.size() != patterns.size())
            throw DimensionMismatch("matrix column count does not match pattern count");

    out << "sequence_id";
    for (const auto& p : patterns) out << ',' << csv_escape(canonical_render(p, db.alphabet));
    out << '\n';
    for (std::size_t r = 0; r < matrix.size(); ++r) {
        out << csv_escape(db.sequences[r].id);
        for (std::uint32_t v : matrix[r]) out << ',' << v;
        out << '\n';
    }
}

}  // namespace seqmine::io
