#include "cayley/specdsl.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>

namespace cayley {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;
constexpr int kInconclusive = 3;

struct Options {
    std::string spec_path;
    std::string event;
    std::optional<Depth> depth;
    Depth maxdepth = 3;
    std::vector<std::string> covers;
    std::string tolerance;
    std::optional<std::uint64_t> term_budget;
    std::optional<std::uint64_t> seed;
    std::string bound;
    bool json_only = false;
};

// Untrusted families are audited up to this depth before sums and probes.
constexpr Depth kAuditDepth = 3;

struct Session {
    SpecDocument doc;
    CylinderField field;
    MeasureFamily family;
};

Session load(const Options& o) {
    std::ifstream in(o.spec_path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read spec file '" + o.spec_path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    SpecDocument doc = parse_spec(text.str());
    if (o.seed && doc.family.type == FamilyType::Random) doc.family.seed = *o.seed;
    CylinderField field = make_field(doc);
    MeasureFamily family = make_family(doc, field);
    return {std::move(doc), std::move(field), std::move(family)};
}

std::string rational_text(const Rational& r) { return r.get_str(); }
std::string extended_text(const Extended& e) { return e.is_infinite() ? "inf" : rational_text(e.finite()); }

CylinderSet event_of(const Options& o, const CylinderField& field) {
    if (o.event.empty()) throw CLI::ValidationError("--event", "an event is required");
    return lower(parse_event(o.event), field);
}

CoverSpec resolve_cover(const std::string& text, const SpecDocument& doc) {
    for (const CoverSpec& c : doc.covers)
        if (c.name == text) return c;
    return parse_cover(text, text);
}

SigmaOptions sigma_options(const Options& o) {
    SigmaOptions s;
    if (!o.tolerance.empty()) {
        s.tolerance = parse_rational(o.tolerance);
        if (sgn(s.tolerance) <= 0) throw std::invalid_argument("tolerance must be positive");
    }
    if (o.term_budget) s.term_budget = *o.term_budget;
    if (!o.bound.empty()) s.divergence_bound = parse_rational(o.bound);
    s.trace_limit = 0;
    return s;
}

struct AuditFailure {
    Json json;
    int code;
    std::string message;
};

ExtensionHandle handle_for(const Session& s, Depth wanted) {
    const Depth d = std::min(std::max<Depth>(wanted, 1), s.family.max_depth());
    try {
        return ExtensionHandle::make(s.family, d);
    } catch (const ConsistencyError& e) {
        Json j;
        j["status"] = "error";
        j["kind"] = "consistency";
        j["error"] = e.what();
        const auto& v = e.report().violation;
        if (v) {
            j["coarse"] = v->coarse;
            j["fine"] = v->fine;
            j["witness"] = s.field.render(v->witness);
        }
        throw AuditFailure{std::move(j), v ? kViolation : kInconclusive, e.what()};
    }
}

Json sum_json(const SigmaResult& r) {
    Json j;
    j["status"] = to_string(r.status);
    j["value"] = rational_text(r.value);
    j["tail_bound"] = rational_text(r.tail_bound);
    j["terms"] = r.terms;
    return j;
}

int sum_exit(const SigmaResult& r) { return r.status == SumStatus::Inconclusive ? kInconclusive : kOk; }

struct Outcome {
    Json json;
    int code = kOk;
    std::string summary;
};

Outcome cmd_validate(const Options& o) {
    const Session s = load(o);
    Outcome out;
    out.json["command"] = "validate";
    out.json["status"] = "ok";
    out.json["order"] = s.doc.order;
    out.json["max_depth"] = s.doc.max_depth;
    out.json["spins"] = s.doc.spins.is_finite() ? std::to_string(s.doc.spins.size()) : "nat";
    out.json["family"] = to_string(s.doc.family.type);
    out.json["kind"] = to_string(s.family.kind());
    out.json["closed_form_consistent"] = s.family.closed_form_consistent();
    out.json["mass"] = extended_text(s.family.at(0)->mass());
    Json covers = Json::array();
    for (const CoverSpec& c : s.doc.covers) covers.push_back({{"name", c.name}, {"cover", print_cover(c)}});
    out.json["covers"] = covers;
    out.summary = "valid " + to_string(s.doc.family.type) + " spec";
    return out;
}

Outcome cmd_eval(const Options& o) {
    const Session s = load(o);
    const CylinderSet e = event_of(o, s.field);
    const Depth base = s.field.base_depth(e);
    const Depth at = o.depth ? std::max(*o.depth, base) : base;
    const ExtensionHandle h = handle_for(s, at);
    const Extended value = h.mu_at(e, at);
    Outcome out;
    out.json["command"] = "eval";
    out.json["event"] = s.field.render(e);
    out.json["base_depth"] = base;
    out.json["depth"] = at;
    out.json["value"] = extended_text(value);
    out.json["trusted"] = h.is_trusted();
    if (!h.is_trusted()) out.json["verified_depth"] = h.verified_depth();
    out.summary = "mu(" + s.field.render(e) + ") = " + extended_text(value);
    return out;
}

Outcome cmd_consistency(const Options& o) {
    const Session s = load(o);
    const Depth d = o.depth.value_or(kAuditDepth);
    const ConsistencyReport r = check_consistency(s.family, d);
    Outcome out;
    out.json["command"] = "consistency";
    out.json["requested"] = r.requested;
    out.json["consistent_to"] = r.consistent_to;
    out.json["exact"] = r.exact;
    out.json["budget_exceeded"] = r.budget_exceeded;
    if (r.violation) {
        out.json["status"] = "violation";
        out.json["violation"] = {{"coarse", r.violation->coarse},
                                 {"fine", r.violation->fine},
                                 {"witness", s.field.render(r.violation->witness)},
                                 {"projected", extended_text(r.violation->projected)},
                                 {"direct", extended_text(r.violation->direct)}};
        out.code = kViolation;
        out.summary = "violation between depths " + std::to_string(r.violation->coarse) + " and " +
                      std::to_string(r.violation->fine) + " on " + s.field.render(r.violation->witness);
    } else if (r.passed() && r.exact) {
        out.json["status"] = "pass";
        out.summary = "consistent to depth " + std::to_string(r.consistent_to);
    } else {
        out.json["status"] = "inconclusive";
        out.code = kInconclusive;
        out.summary = "no violation found, consistency not certified beyond depth " + std::to_string(r.consistent_to);
    }
    return out;
}

Outcome cmd_probe_empty(const Options& o) {
    const Session s = load(o);
    const ExtensionHandle h = handle_for(s, o.maxdepth);
    const CylinderField& f = s.field;
    auto seq = [&](Depth n) {
        std::vector<Rectangle::Entry> entries;
        for (VertexIndex v = 0; v < f.tree().ball_size(n); ++v) entries.emplace_back(v, SiteConstraint::in({0}));
        return f.from_rectangle(f.make_rectangle(std::move(entries)));
    };
    const ContinuityReport r = continuity_probe(h, seq, o.maxdepth);
    Outcome out;
    out.json["command"] = "probe-empty";
    Json values = Json::array();
    for (const auto& [n, v] : r.values) values.push_back({{"depth", n}, {"value", extended_text(v)}});
    out.json["values"] = values;
    out.json["non_increasing"] = r.non_increasing;
    out.json["verdict"] = to_string(r.verdict);
    out.summary = "mu(C_n) at n = " + std::to_string(o.maxdepth) + ": " + extended_text(r.values.back().second) + " (" +
                  to_string(r.verdict) + ")";
    return out;
}

Outcome cmd_sigma_eval(const Options& o) {
    const Session s = load(o);
    if (o.covers.size() != 1) throw CLI::ValidationError("--cover", "exactly one cover is required");
    const CylinderSet e = event_of(o, s.field);
    const CoverSpec cs = resolve_cover(o.covers[0], s.doc);
    const SigmaResult r = sigma_extension(handle_for(s, kAuditDepth), make_cover(cs, s.field)).evaluate(e, sigma_options(o));
    Outcome out;
    out.json["command"] = "sigma-eval";
    out.json["cover"] = print_cover(cs);
    out.json["event"] = s.field.render(e);
    out.json.update(sum_json(r));
    out.code = sum_exit(r);
    out.summary = "sum over " + std::to_string(r.terms) + " parts = " + rational_text(r.value) + " (" +
                  to_string(r.status) + ")";
    return out;
}

Outcome cmd_covers_compare(const Options& o) {
    const Session s = load(o);
    if (o.covers.size() != 2) throw CLI::ValidationError("--cover", "exactly two covers are required");
    const CylinderSet e = event_of(o, s.field);
    const CoverSpec a = resolve_cover(o.covers[0], s.doc);
    const CoverSpec b = resolve_cover(o.covers[1], s.doc);
    const CoverComparison r = cover_independence(handle_for(s, kAuditDepth), make_cover(a, s.field),
                                                 make_cover(b, s.field), e, sigma_options(o));
    Outcome out;
    out.json["command"] = "covers-compare";
    out.json["covers"] = {print_cover(a), print_cover(b)};
    out.json["event"] = s.field.render(e);
    out.json["first"] = sum_json(r.first);
    out.json["second"] = sum_json(r.second);
    out.json["agree"] = r.agree;
    out.json["exact"] = r.exact;
    const bool certified = [&] {
        auto ok = [](const SigmaResult& x) { return x.status == SumStatus::Exact || x.status == SumStatus::Converged; };
        return ok(r.first) && ok(r.second);
    }();
    if (r.agree && certified) {
        out.summary = "covers agree";
    } else if (!r.agree && certified) {
        out.code = kViolation;
        out.summary = "covers disagree";
    } else {
        out.code = kInconclusive;
        out.summary = "comparison inconclusive";
    }
    return out;
}

Outcome cmd_condition27(const Options& o) {
    const Session s = load(o);
    if (o.covers.size() != 1) throw CLI::ValidationError("--cover", "exactly one cover is required");
    const CylinderSet e = event_of(o, s.field);
    const CoverSpec cs = resolve_cover(o.covers[0], s.doc);
    const Condition27Report r =
        condition_2_7_check(handle_for(s, kAuditDepth), make_cover(cs, s.field), e, sigma_options(o));
    Outcome out;
    out.json["command"] = "condition27";
    out.json["cover"] = print_cover(cs);
    out.json["event"] = s.field.render(e);
    out.json["direct"] = extended_text(r.direct);
    out.json["cover_sum"] = sum_json(r.cover_sum);
    out.json["terms"] = r.cover_sum.terms;
    out.json["tail_bound"] = rational_text(r.cover_sum.tail_bound);
    out.json["verdict"] = to_string(r.verdict);
    out.code = r.verdict == Verdict::Pass ? kOk : r.verdict == Verdict::Fail ? kViolation : kInconclusive;
    out.summary = to_string(r.verdict) + ": direct " + extended_text(r.direct) + ", cover sum " +
                  rational_text(r.cover_sum.value) + " over " + std::to_string(r.cover_sum.terms) + " terms";
    return out;
}

Json error_json(const std::string& message) {
    Json j;
    j["status"] = "error";
    j["error"] = message;
    return j;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Exact measures on Cayley-tree configuration spaces", "cayley"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--spec", o.spec_path, "spec file")->required();
        sub->add_flag("--json", o.json_only, "suppress the summary line on stderr");
        sub->add_option("--seed", o.seed, "seed for random families");
    };
    auto add_sum = [&](CLI::App* sub) {
        sub->add_option("--event", o.event, "event expression")->required();
        sub->add_option("--tolerance", o.tolerance, "convergence tolerance p/q");
        sub->add_option("--term-budget", o.term_budget, "maximum number of cover terms");
        sub->add_option("--bound", o.bound, "divergence bound p/q");
    };

    CLI::App* validate = app.add_subcommand("validate", "parse and check a spec");
    add_common(validate);
    CLI::App* eval = app.add_subcommand("eval", "evaluate mu(E)");
    add_common(eval);
    eval->add_option("--event", o.event, "event expression")->required();
    eval->add_option("--depth", o.depth, "evaluation depth (default: base depth of the event)");
    CLI::App* consistency = app.add_subcommand("consistency", "audit projections up to a depth");
    add_common(consistency);
    consistency->add_option("--depth", o.depth, "audit depth")->default_str("3");
    CLI::App* probe = app.add_subcommand("probe-empty", "continuity probe on C_n = {sigma = 0 on V_n}");
    add_common(probe);
    probe->add_option("--maxdepth", o.maxdepth, "last depth")->capture_default_str();
    CLI::App* sigma = app.add_subcommand("sigma-eval", "sum mu(E ∩ A_i) over a cover");
    add_common(sigma);
    add_sum(sigma);
    sigma->add_option("--cover", o.covers, "cover name or descriptor")->required();
    CLI::App* compare = app.add_subcommand("covers-compare", "sum over two covers and compare");
    add_common(compare);
    add_sum(compare);
    compare->add_option("--cover", o.covers, "cover name or descriptor (twice)")->required();
    CLI::App* cond = app.add_subcommand("condition27", "compare mu(E) with the cover sum");
    add_common(cond);
    add_sum(cond);
    cond->add_option("--cover", o.covers, "cover name or descriptor")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        out << error_json(e.what()).dump() << "\n";
        return kUsage;
    }

    Outcome result;
    try {
        if (validate->parsed()) result = cmd_validate(o);
        else if (eval->parsed()) result = cmd_eval(o);
        else if (consistency->parsed()) result = cmd_consistency(o);
        else if (probe->parsed()) result = cmd_probe_empty(o);
        else if (sigma->parsed()) result = cmd_sigma_eval(o);
        else if (compare->parsed()) result = cmd_covers_compare(o);
        else result = cmd_condition27(o);
    } catch (const SyntaxError& e) {
        Json j = error_json(e.what());
        j["kind"] = "syntax";
        j["line"] = e.line();
        j["column"] = e.column();
        j["expected"] = e.expected();
        out << j.dump() << "\n";
        err << "syntax error: " << e.what() << "\n";
        return kUsage;
    } catch (const SemanticError& e) {
        Json j = error_json(e.what());
        j["kind"] = "semantic";
        out << j.dump() << "\n";
        err << "semantic error: " << e.what() << "\n";
        return kUsage;
    } catch (const AuditFailure& e) {
        out << e.json.dump() << "\n";
        err << "consistency error: " << e.message << "\n";
        return e.code;
    } catch (const CLI::Error& e) {
        out << error_json(e.what()).dump() << "\n";
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        out << error_json(e.what()).dump() << "\n";
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    out << result.json.dump() << "\n";
    if (!o.json_only) err << result.summary << "\n";
    return result.code;
}

} // namespace cayley
