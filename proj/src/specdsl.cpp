#include "cayley/specdsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace cayley {

namespace {

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::string describe_expected(const std::vector<std::string>& expected) {
    if (expected.size() == 1) return expected[0];
    return "one of " + join(expected, ", ");
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

constexpr std::uint64_t kMaxRangeValues = std::uint64_t{1} << 20;

} // namespace

SyntaxError::SyntaxError(std::size_t line, std::size_t column, std::vector<std::string> expected, const std::string& found)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": expected " +
                         describe_expected(expected) + ", found " + (found.empty() ? "end of input" : "'" + found + "'")),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

// ---- event grammar -------------------------------------------------------------
//
// event  := or
// or     := and { '|' and }
// and    := unary { '&' unary }
// unary  := '!' unary | '(' or ')' | 'all' | 'none' | site
// site   := 'x' INT ( '=' INT | 'in' set | 'notin' set )
// set    := '{' [ item { ',' item } ] '}'
// item   := INT [ '..' INT ]

namespace {

class EventParser {
public:
    EventParser(std::string_view text, std::size_t line, std::size_t column)
        : text_(text), line_(line), column_(column) {}

    EventExpr parse() {
        EventExpr e = parse_or();
        skip_ws();
        if (pos_ != text_.size()) fail({"'&'", "'|'", "end of input"});
        return e;
    }

private:
    [[noreturn]] void fail(std::vector<std::string> expected) const {
        std::size_t end = pos_;
        while (end < text_.size() && !std::isspace(static_cast<unsigned char>(text_[end])) && end - pos_ < 12) ++end;
        throw SyntaxError(line_, column_ + pos_, std::move(expected), std::string(text_.substr(pos_, end - pos_)));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(std::string_view token) {
        skip_ws();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    std::string word() {
        skip_ws();
        std::size_t end = pos_;
        while (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) ++end;
        return std::string(text_.substr(pos_, end - pos_));
    }

    std::uint64_t integer() {
        skip_ws();
        std::uint64_t v = 0;
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr == first) fail({"integer"});
        pos_ += static_cast<std::size_t>(ptr - first);
        return v;
    }

    EventExpr combine(EventExpr::Kind kind, std::vector<EventExpr> children) {
        if (children.size() == 1) return std::move(children[0]);
        EventExpr e;
        e.kind = kind;
        e.children = std::move(children);
        return e;
    }

    EventExpr parse_or() {
        std::vector<EventExpr> parts{parse_and()};
        while (accept("|")) parts.push_back(parse_and());
        return combine(EventExpr::Kind::Or, std::move(parts));
    }

    EventExpr parse_and() {
        std::vector<EventExpr> parts{parse_unary()};
        while (accept("&")) parts.push_back(parse_unary());
        return combine(EventExpr::Kind::And, std::move(parts));
    }

    EventExpr parse_unary() {
        if (accept("!")) {
            EventExpr e;
            e.kind = EventExpr::Kind::Not;
            e.children.push_back(parse_unary());
            return e;
        }
        if (accept("(")) {
            EventExpr e = parse_or();
            if (!accept(")")) fail({"')'", "'&'", "'|'"});
            return e;
        }
        skip_ws();
        const std::size_t start = pos_;
        const std::string w = word();
        if (w == "all" || w == "none") {
            pos_ += w.size();
            EventExpr e;
            e.kind = w == "all" ? EventExpr::Kind::All : EventExpr::Kind::None;
            return e;
        }
        if (pos_ < text_.size() && text_[pos_] == 'x' && pos_ + 1 < text_.size() &&
            std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
            ++pos_;
            return parse_site();
        }
        pos_ = start;
        fail({"'!'", "'('", "'all'", "'none'", "site 'xI'"});
    }

    EventExpr parse_site() {
        EventExpr e;
        e.vertex = integer();
        if (accept("=")) {
            e.kind = EventExpr::Kind::Equals;
            e.values.push_back(integer());
            return e;
        }
        const std::string w = word();
        if (w == "in" || w == "notin") {
            pos_ += w.size();
            e.kind = w == "in" ? EventExpr::Kind::In : EventExpr::Kind::NotIn;
            e.values = parse_set();
            return e;
        }
        fail({"'='", "'in'", "'notin'"});
    }

    std::vector<Spin> parse_set() {
        if (!accept("{")) fail({"'{'"});
        std::set<Spin> values;
        if (accept("}")) return {};
        do {
            const std::uint64_t a = integer();
            std::uint64_t b = a;
            if (accept("..")) b = integer();
            if (b < a) throw SemanticError("empty range " + std::to_string(a) + ".." + std::to_string(b));
            if (b - a >= kMaxRangeValues) throw SemanticError("range " + std::to_string(a) + ".." + std::to_string(b) + " is too large");
            for (std::uint64_t q = a; q <= b; ++q) values.insert(q);
        } while (accept(","));
        if (!accept("}")) fail({"','", "'}'"});
        return {values.begin(), values.end()};
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_;
    std::size_t column_;
};

EventExpr parse_event_at(std::string_view text, std::size_t line, std::size_t column) {
    return EventParser(text, line, column).parse();
}

std::string print_values(const std::vector<Spin>& values) {
    std::vector<std::string> items;
    for (Spin v : values) items.push_back(std::to_string(v));
    return "{" + join(items, ",") + "}";
}

bool is_leaf(const EventExpr& e) {
    return e.kind != EventExpr::Kind::And && e.kind != EventExpr::Kind::Or && e.kind != EventExpr::Kind::Not;
}

} // namespace

EventExpr parse_event(std::string_view text) { return parse_event_at(text, 1, 1); }

std::string print_event(const EventExpr& e) {
    using K = EventExpr::Kind;
    const std::string site = "x" + std::to_string(e.vertex);
    switch (e.kind) {
    case K::All: return "all";
    case K::None: return "none";
    case K::Equals: return site + "=" + std::to_string(e.values.at(0));
    case K::In: return site + " in " + print_values(e.values);
    case K::NotIn: return site + " notin " + print_values(e.values);
    case K::Not: {
        const EventExpr& c = e.children.at(0);
        const std::string inner = print_event(c);
        return "!" + (is_leaf(c) || c.kind == K::Not ? inner : "(" + inner + ")");
    }
    case K::And:
    case K::Or: {
        std::vector<std::string> parts;
        for (const EventExpr& c : e.children) {
            const bool wrap = c.kind == K::Or || (e.kind == K::And && c.kind == K::And);
            parts.push_back(wrap ? "(" + print_event(c) + ")" : print_event(c));
        }
        return join(parts, e.kind == K::And ? " & " : " | ");
    }
    }
    return "";
}

CylinderSet lower(const EventExpr& e, const CylinderField& field) {
    using K = EventExpr::Kind;
    switch (e.kind) {
    case K::All: return field.universe();
    case K::None: return field.empty();
    case K::Equals:
    case K::In:
    case K::NotIn: {
        const VertexIndex limit = field.tree().ball_size(field.tree().max_depth());
        if (e.vertex >= limit)
            throw SemanticError("vertex x" + std::to_string(e.vertex) + " lies beyond the maximum depth");
        for (Spin q : e.values)
            if (!field.spins().contains(q)) throw SemanticError("spin " + std::to_string(q) + " out of range");
        const SiteConstraint c = e.kind == K::NotIn ? SiteConstraint::not_in(e.values) : SiteConstraint::in(e.values);
        return field.from_rectangle(field.make_rectangle({{e.vertex, c}}));
    }
    case K::Not: return field.complement(lower(e.children.at(0), field));
    case K::And: {
        CylinderSet out = field.universe();
        for (const EventExpr& c : e.children) out = field.intersect(out, lower(c, field));
        return out;
    }
    case K::Or: {
        CylinderSet out = field.empty();
        for (const EventExpr& c : e.children) out = field.unite(out, lower(c, field));
        return out;
    }
    }
    return field.empty();
}

// ---- covers ------------------------------------------------------------------------

namespace {

std::optional<std::uint64_t> call_argument(std::string_view text, std::string_view head) {
    if (text.substr(0, head.size()) != head || text.back() != ')') return std::nullopt;
    std::string_view inner = trim(text.substr(head.size(), text.size() - head.size() - 1));
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(inner.data(), inner.data() + inner.size(), v);
    if (ec != std::errc() || ptr != inner.data() + inner.size()) return std::nullopt;
    return v;
}

CoverSpec parse_cover_at(std::string_view name, std::string_view raw, std::size_t line, std::size_t column) {
    CoverSpec c;
    c.name = std::string(name);
    const std::string_view text = trim(raw);
    const std::size_t lead = static_cast<std::size_t>(text.data() - raw.data());
    if (text == "root-slices") {
        c.kind = CoverSpec::Kind::RootSlices;
    } else if (text == "whole") {
        c.kind = CoverSpec::Kind::Whole;
    } else if (auto b = call_argument(text, "root-blocks(")) {
        if (*b == 0) throw SemanticError("root-blocks needs a positive block size");
        c.kind = CoverSpec::Kind::RootBlocks;
        c.parameter = *b;
    } else if (auto n = call_argument(text, "atoms(")) {
        c.kind = CoverSpec::Kind::Atoms;
        c.parameter = *n;
    } else if (text.substr(0, 5) == "list:") {
        c.kind = CoverSpec::Kind::List;
        std::size_t start = 5;
        while (true) {
            const std::size_t stop = text.find(';', start);
            const std::string_view piece = text.substr(start, stop == std::string_view::npos ? text.npos : stop - start);
            c.events.push_back(parse_event_at(piece, line, column + lead + start));
            if (stop == std::string_view::npos) break;
            start = stop + 1;
        }
    } else {
        throw SyntaxError(line, column + lead, {"'root-slices'", "'root-blocks(b)'", "'atoms(n)'", "'whole'", "'list:'"},
                          std::string(text));
    }
    return c;
}

} // namespace

CoverSpec parse_cover(std::string_view name, std::string_view text) { return parse_cover_at(name, text, 1, 1); }

std::string print_cover(const CoverSpec& c) {
    switch (c.kind) {
    case CoverSpec::Kind::RootSlices: return "root-slices";
    case CoverSpec::Kind::RootBlocks: return "root-blocks(" + std::to_string(c.parameter) + ")";
    case CoverSpec::Kind::Atoms: return "atoms(" + std::to_string(c.parameter) + ")";
    case CoverSpec::Kind::Whole: return "whole";
    case CoverSpec::Kind::List: {
        std::vector<std::string> parts;
        for (const EventExpr& e : c.events) parts.push_back(print_event(e));
        return "list: " + join(parts, " ; ");
    }
    }
    return "";
}

Cover make_cover(const CoverSpec& c, const CylinderField& field) {
    switch (c.kind) {
    case CoverSpec::Kind::RootSlices: return Cover::root_slices(field);
    case CoverSpec::Kind::RootBlocks: return Cover::root_blocks(field, c.parameter);
    case CoverSpec::Kind::Atoms: return Cover::atoms(field, static_cast<Depth>(c.parameter));
    case CoverSpec::Kind::Whole: return Cover::whole(field);
    case CoverSpec::Kind::List: {
        std::vector<CylinderSet> parts;
        CylinderSet all = field.empty();
        for (const EventExpr& e : c.events) {
            parts.push_back(lower(e, field));
            all = field.unite(all, parts.back());
        }
        if (field.semantic_equal(all, field.universe()) != Decision::Yes)
            throw SemanticError("cover '" + c.name + "' does not exhaust the configuration space");
        return Cover::finite(c.name, std::move(parts));
    }
    }
    throw std::logic_error("unknown cover kind");
}

// ---- spec documents -------------------------------------------------------------------
//
// document := { line }
// line     := [ '[' section ']' | key '=' value ] [ '#' comment ]
// sequence := { rational } [ tail ]        tail := 'zero' | 'const(' q ')' | 'geom(' q ',' q ')'
// kernel   := row { ';' row }              row  := [ '*' ] sequence

std::string to_string(FamilyType t) {
    switch (t) {
    case FamilyType::Markov: return "markov";
    case FamilyType::MarkovProb: return "markov-prob";
    case FamilyType::Product: return "product";
    case FamilyType::Table: return "table";
    case FamilyType::Random: return "random";
    }
    return "unknown";
}

namespace {

struct Located {
    std::string_view text;
    std::size_t line = 0;
    std::size_t column = 0;  // of text[0]
};

struct ParsedSequence {
    WeightSequence sequence;
    bool has_tail = false;
};

Rational rational_at(std::string_view token, std::size_t line, std::size_t column) {
    try {
        return parse_rational(token);
    } catch (const std::invalid_argument&) {
        throw SyntaxError(line, column, {"rational 'p/q'", "tail 'zero', 'const(c)' or 'geom(c,r)'"}, std::string(token));
    }
}

std::uint64_t integer_at(const Located& v) {
    std::uint64_t out = 0;
    const std::string_view t = trim(v.text);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw SyntaxError(v.line, v.column + static_cast<std::size_t>(t.data() - v.text.data()), {"integer"},
                          std::string(t));
    return out;
}

ParsedSequence parse_sequence(const Located& v) {
    ParsedSequence out;
    std::vector<Rational> prefix;
    Tail tail;
    std::size_t i = 0;
    const std::string_view s = v.text;
    while (true) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i == s.size()) break;
        const std::size_t start = i;
        const std::size_t col = v.column + start;
        if (out.has_tail) throw SyntaxError(v.line, col, {"end of sequence after the tail"}, std::string(s.substr(start)));
        if (std::isalpha(static_cast<unsigned char>(s[i]))) {
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            const std::string_view name = s.substr(start, i - start);
            std::vector<std::string_view> args;
            if (i < s.size() && s[i] == '(') {
                const std::size_t close = s.find(')', i);
                if (close == std::string_view::npos) throw SyntaxError(v.line, v.column + s.size(), {"')'"}, "");
                std::string_view inner = s.substr(i + 1, close - i - 1);
                std::size_t from = 0;
                while (true) {
                    const std::size_t comma = inner.find(',', from);
                    args.push_back(trim(inner.substr(from, comma == inner.npos ? inner.npos : comma - from)));
                    if (comma == inner.npos) break;
                    from = comma + 1;
                }
                i = close + 1;
            }
            try {
                if (name == "zero" && args.empty()) {
                    tail = Tail::zero();
                } else if (name == "const" && args.size() == 1) {
                    tail = Tail::constant(rational_at(args[0], v.line, col));
                } else if (name == "geom" && args.size() == 2) {
                    tail = Tail::geometric(rational_at(args[0], v.line, col), rational_at(args[1], v.line, col));
                } else {
                    throw SyntaxError(v.line, col, {"rational 'p/q'", "'zero'", "'const(c)'", "'geom(c,r)'"},
                                      std::string(s.substr(start, i - start)));
                }
            } catch (const std::invalid_argument& e) {
                throw SemanticError(std::string(e.what()));
            }
            out.has_tail = true;
            continue;
        }
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const Rational r = rational_at(s.substr(start, i - start), v.line, col);
        if (sgn(r) < 0) throw SemanticError("weights must be non-negative");
        prefix.push_back(r);
    }
    out.sequence = WeightSequence(std::move(prefix), tail);
    return out;
}

std::vector<Located> split(const Located& v, char sep) {
    std::vector<Located> out;
    std::size_t from = 0;
    while (true) {
        const std::size_t at = v.text.find(sep, from);
        const std::size_t len = at == std::string_view::npos ? v.text.size() - from : at - from;
        out.push_back({v.text.substr(from, len), v.line, v.column + from});
        if (at == std::string_view::npos) break;
        from = at + 1;
    }
    return out;
}

std::string print_sequence(const WeightSequence& w, bool naturals) {
    std::vector<std::string> items;
    for (const Rational& r : w.prefix()) items.push_back(to_string(r));
    if (naturals) {
        const Tail& t = w.tail();
        switch (t.kind) {
        case Tail::Kind::Zero: items.push_back("zero"); break;
        case Tail::Kind::Constant: items.push_back("const(" + to_string(t.coefficient) + ")"); break;
        case Tail::Kind::Geometric:
            items.push_back("geom(" + to_string(t.coefficient) + "," + to_string(t.ratio) + ")");
            break;
        }
    }
    return join(items, " ");
}

struct RawDocument {
    std::map<std::string, std::map<std::string, Located>> sections;
    std::vector<std::pair<std::string, Located>> covers;  // declared order
};

RawDocument read_lines(std::string_view text) {
    static const std::map<std::string, std::set<std::string>> allowed{
        {"tree", {"k", "max_depth"}},
        {"spins", {"size"}},
        {"family", {"kind", "root", "kernel", "weights", "depth", "table", "seed", "scale"}},
        {"covers", {}},
    };
    RawDocument doc;
    std::string section;
    std::size_t line_no = 0;
    std::size_t from = 0;
    while (from <= text.size()) {
        const std::size_t nl = text.find('\n', from);
        std::string_view line = text.substr(from, nl == text.npos ? text.npos : nl - from);
        from = nl == text.npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const std::size_t hash = line.find('#'); hash != line.npos) line = line.substr(0, hash);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const std::string_view body = trim(line);
        if (body.empty()) continue;
        const std::size_t col = static_cast<std::size_t>(body.data() - line.data()) + 1;
        if (body.front() == '[') {
            const std::size_t close = body.find(']');
            const std::string name(body.substr(1, close == body.npos ? body.npos : close - 1));
            if (close != body.size() - 1 || !allowed.contains(name))
                throw SyntaxError(line_no, col, {"'[tree]'", "'[spins]'", "'[family]'", "'[covers]'"}, std::string(body));
            if (doc.sections.contains(name)) throw SemanticError("line " + std::to_string(line_no) + ": duplicate section [" + name + "]");
            section = name;
            doc.sections[name];
            continue;
        }
        const std::size_t eq = body.find('=');
        std::size_t key_end = 0;
        while (key_end < body.size() &&
               (std::isalnum(static_cast<unsigned char>(body[key_end])) || body[key_end] == '_' || body[key_end] == '-'))
            ++key_end;
        if (key_end == 0) throw SyntaxError(line_no, col, {"key", "section header"}, std::string(body));
        if (eq == body.npos || !trim(body.substr(key_end, eq - key_end)).empty())
            throw SyntaxError(line_no, col + key_end, {"'='"}, std::string(body.substr(key_end)));
        const std::string key(body.substr(0, key_end));
        if (section.empty()) throw SyntaxError(line_no, col, {"section header"}, key);
        const Located value{body.substr(eq + 1), line_no, col + eq + 1};
        if (section == "covers") {
            for (const auto& [name, _] : doc.covers)
                if (name == key) throw SemanticError("line " + std::to_string(line_no) + ": duplicate cover '" + key + "'");
            doc.covers.emplace_back(key, value);
            continue;
        }
        const auto& keys = allowed.at(section);
        if (!keys.contains(key)) {
            std::vector<std::string> expected;
            for (const auto& k : keys) expected.push_back("'" + k + "'");
            throw SyntaxError(line_no, col, expected, key);
        }
        auto& slot = doc.sections[section];
        if (slot.contains(key)) throw SemanticError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        slot.emplace(key, value);
    }
    return doc;
}

const Located& require(const RawDocument& doc, const std::string& section, const std::string& key) {
    auto s = doc.sections.find(section);
    if (s == doc.sections.end()) throw SemanticError("missing section [" + section + "]");
    auto k = s->second.find(key);
    if (k == s->second.end()) throw SemanticError("missing key '" + key + "' in [" + section + "]");
    return k->second;
}

const Located* optional_key(const RawDocument& doc, const std::string& section, const std::string& key) {
    auto s = doc.sections.find(section);
    if (s == doc.sections.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

WeightSequence checked_sequence(const Located& v, const SpinSet& spins, const std::string& what) {
    ParsedSequence p = parse_sequence(v);
    if (!spins.is_finite() && !p.has_tail)
        throw SemanticError("line " + std::to_string(v.line) + ": missing tail descriptor for " + what +
                            " over the naturals");
    try {
        validate_weights(p.sequence, spins, what.c_str());
    } catch (const std::invalid_argument& e) {
        throw SemanticError("line " + std::to_string(v.line) + ": " + e.what());
    }
    return p.sequence;
}

TransitionKernel parse_kernel(const Located& v, const SpinSet& spins) {
    std::vector<WeightSequence> rows;
    std::optional<WeightSequence> default_row;
    for (Located row : split(v, ';')) {
        const std::string_view t = trim(row.text);
        row.column += static_cast<std::size_t>(t.data() - row.text.data());
        row.text = t;
        if (!row.text.empty() && row.text.front() == '*') {
            if (default_row) throw SemanticError("line " + std::to_string(v.line) + ": more than one default row");
            row.text.remove_prefix(1);
            ++row.column;
            default_row = checked_sequence(row, spins, "kernel default row");
            continue;
        }
        if (default_row) throw SyntaxError(row.line, row.column, {"end of kernel after the default row"}, std::string(row.text));
        rows.push_back(checked_sequence(row, spins, "kernel row " + std::to_string(rows.size())));
    }
    TransitionKernel kernel(std::move(rows), std::move(default_row));
    try {
        validate_kernel(kernel, spins);
    } catch (const std::invalid_argument& e) {
        throw SemanticError("line " + std::to_string(v.line) + ": " + e.what());
    }
    return kernel;
}

} // namespace

SpecDocument parse_spec(std::string_view text) {
    const RawDocument raw = read_lines(text);
    SpecDocument d;

    const std::uint64_t k = integer_at(require(raw, "tree", "k"));
    if (k == 0 || k > 64) throw SemanticError("tree order k must lie in [1, 64]");
    d.order = static_cast<unsigned>(k);
    if (const Located* m = optional_key(raw, "tree", "max_depth")) {
        const std::uint64_t md = integer_at(*m);
        if (md > 64) throw SemanticError("max_depth must not exceed 64");
        d.max_depth = static_cast<Depth>(md);
    }
    try {
        (void)TreeGeometry(d.order, d.max_depth);
    } catch (const std::exception& e) {
        throw SemanticError(e.what());
    }

    const Located& size = require(raw, "spins", "size");
    if (trim(size.text) == "nat") {
        d.spins = SpinSet::naturals();
    } else {
        const std::uint64_t s = integer_at(size);
        if (s == 0) throw SemanticError("spin alphabet must be non-empty");
        d.spins = SpinSet::finite(s);
    }
    const bool naturals = !d.spins.is_finite();

    FamilySpec& fam = d.family;
    const std::string kind(trim(require(raw, "family", "kind").text));
    static const std::map<std::string, FamilyType> kinds{{"markov", FamilyType::Markov},
                                                         {"markov-prob", FamilyType::MarkovProb},
                                                         {"product", FamilyType::Product},
                                                         {"table", FamilyType::Table},
                                                         {"random", FamilyType::Random}};
    auto kt = kinds.find(kind);
    if (kt == kinds.end()) {
        const Located& v = require(raw, "family", "kind");
        throw SyntaxError(v.line, v.column, {"'markov'", "'markov-prob'", "'product'", "'table'", "'random'"}, kind);
    }
    fam.type = kt->second;

    std::set<std::string> used{"kind", "scale"};
    switch (fam.type) {
    case FamilyType::Markov:
    case FamilyType::MarkovProb:
        fam.root = checked_sequence(require(raw, "family", "root"), d.spins, "root weights");
        fam.kernel = parse_kernel(require(raw, "family", "kernel"), d.spins);
        used.insert({"root", "kernel"});
        if (fam.type == FamilyType::MarkovProb) {
            if (!(fam.root.total() == Extended(1))) throw SemanticError("markov-prob: root weights do not sum to 1");
            for (std::size_t q = 0; q < fam.kernel.rows().size(); ++q)
                if (!(fam.kernel.rows()[q].total() == Extended(1)))
                    throw SemanticError("markov-prob: non-stochastic row " + std::to_string(q));
            if (fam.kernel.default_row() && !(fam.kernel.default_row()->total() == Extended(1)))
                throw SemanticError("markov-prob: non-stochastic default row");
        }
        break;
    case FamilyType::Product:
        fam.weights = checked_sequence(require(raw, "family", "weights"), d.spins, "site weights");
        used.insert("weights");
        break;
    case FamilyType::Table:
    case FamilyType::Random: {
        if (naturals) throw SemanticError(to_string(fam.type) + " families need finite spins");
        const std::uint64_t depth = integer_at(require(raw, "family", "depth"));
        if (depth > d.max_depth) throw SemanticError("table depth exceeds max_depth");
        fam.depth = static_cast<Depth>(depth);
        used.insert("depth");
        const TreeGeometry tree(d.order, d.max_depth);
        std::uint64_t atoms = 1;
        for (VertexIndex i = 0; i < tree.ball_size(fam.depth); ++i) {
            if (atoms > CylinderField::default_atom_budget / d.spins.size())
                throw SemanticError("table depth exceeds the atom budget");
            atoms *= d.spins.size();
        }
        if (fam.type == FamilyType::Table) {
            const Located& t = require(raw, "family", "table");
            ParsedSequence p = parse_sequence(t);
            if (p.has_tail) throw SemanticError("line " + std::to_string(t.line) + ": tables take no tail descriptor");
            fam.table = p.sequence.prefix();
            if (fam.table.size() != atoms)
                throw SemanticError("line " + std::to_string(t.line) + ": table needs " + std::to_string(atoms) +
                                    " entries, got " + std::to_string(fam.table.size()));
            used.insert("table");
        } else {
            fam.seed = integer_at(require(raw, "family", "seed"));
            used.insert("seed");
        }
        break;
    }
    }
    if (const Located* s = optional_key(raw, "family", "scale")) {
        fam.scale = rational_at(trim(s->text), s->line, s->column);
        if (sgn(fam.scale) <= 0) throw SemanticError("line " + std::to_string(s->line) + ": scale must be positive");
    }
    for (const auto& [key, v] : raw.sections.at("family"))
        if (!used.contains(key))
            throw SemanticError("line " + std::to_string(v.line) + ": key '" + key + "' does not apply to " +
                                to_string(fam.type) + " families");

    const CylinderField field = make_field(d);
    for (const auto& [name, v] : raw.covers) {
        CoverSpec c = parse_cover_at(name, v.text, v.line, v.column);
        if (c.kind == CoverSpec::Kind::Atoms && naturals) throw SemanticError("cover '" + name + "': atoms need finite spins");
        for (const EventExpr& e : c.events) (void)lower(e, field);
        d.covers.push_back(std::move(c));
    }
    return d;
}

std::string print_spec(const SpecDocument& d) {
    std::ostringstream out;
    const bool naturals = !d.spins.is_finite();
    out << "[tree]\nk = " << d.order << "\n";
    if (d.max_depth != 16) out << "max_depth = " << d.max_depth << "\n";
    out << "\n[spins]\nsize = " << (naturals ? std::string("nat") : std::to_string(d.spins.size())) << "\n";
    const FamilySpec& f = d.family;
    out << "\n[family]\nkind = " << to_string(f.type) << "\n";
    switch (f.type) {
    case FamilyType::Markov:
    case FamilyType::MarkovProb: {
        out << "root = " << print_sequence(f.root, naturals) << "\n";
        std::vector<std::string> rows;
        for (const auto& r : f.kernel.rows()) rows.push_back(print_sequence(r, naturals));
        if (f.kernel.default_row()) rows.push_back("* " + print_sequence(*f.kernel.default_row(), naturals));
        out << "kernel = " << join(rows, " ; ") << "\n";
        break;
    }
    case FamilyType::Product: out << "weights = " << print_sequence(f.weights, naturals) << "\n"; break;
    case FamilyType::Table: {
        out << "depth = " << f.depth << "\n";
        std::vector<std::string> items;
        for (const Rational& r : f.table) items.push_back(to_string(r));
        out << "table = " << join(items, " ") << "\n";
        break;
    }
    case FamilyType::Random: out << "depth = " << f.depth << "\nseed = " << f.seed << "\n"; break;
    }
    if (f.scale != 1) out << "scale = " << to_string(f.scale) << "\n";
    if (!d.covers.empty()) {
        out << "\n[covers]\n";
        for (const CoverSpec& c : d.covers) out << c.name << " = " << print_cover(c) << "\n";
    }
    return out.str();
}

CylinderField make_field(const SpecDocument& d) {
    return CylinderField(Space{TreeGeometry(d.order, d.max_depth), d.spins});
}

MeasureFamily make_family(const SpecDocument& d, const CylinderField& field) {
    const FamilySpec& f = d.family;
    std::optional<MeasureFamily> fam;
    switch (f.type) {
    case FamilyType::Markov:
    case FamilyType::MarkovProb: fam = markov_family(field, f.root, f.kernel); break;
    case FamilyType::Product: fam = product_family(field, f.weights); break;
    case FamilyType::Table: {
        mpz_class denom = 1;
        for (const Rational& r : f.table) mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), r.get_den().get_mpz_t());
        DenseTable t;
        t.unit = Rational(1) / Rational(denom);
        t.counts.reserve(f.table.size());
        for (const Rational& r : f.table) {
            const mpz_class c = r.get_num() * (denom / r.get_den());
            if (!c.fits_slong_p()) throw SemanticError("table weights exceed 64-bit counts over a common denominator");
            t.counts.push_back(c.get_si());
        }
        fam = table_family(VolumeMeasure(field, f.depth, std::move(t)));
        break;
    }
    case FamilyType::Random: fam = random_consistent_family(field, f.seed, f.depth); break;
    }
    if (f.scale != 1) return scale(*fam, f.scale);
    return *fam;
}

} // namespace cayley
