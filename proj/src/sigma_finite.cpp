#include "cayley/sigma_finite.hpp"

#include <algorithm>
#include <numeric>

namespace cayley {

std::string to_string(TailPolicy p) {
    switch (p) {
    case TailPolicy::FiniteList: return "finite-list";
    case TailPolicy::RootExhaustion: return "root-exhaustion";
    case TailPolicy::GeometricBound: return "geometric-bound";
    case TailPolicy::None: return "none";
    }
    return "unknown";
}

std::string to_string(SumStatus s) {
    switch (s) {
    case SumStatus::Exact: return "exact";
    case SumStatus::Converged: return "converged";
    case SumStatus::DivergesBeyond: return "diverges-beyond";
    case SumStatus::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "unknown";
}

// ---- covers -------------------------------------------------------------------

Cover Cover::finite(std::string name, std::vector<CylinderSet> parts) {
    Cover c;
    c.name_ = std::move(name);
    c.parts_ = std::move(parts);
    c.policy_ = TailPolicy::FiniteList;
    return c;
}

Cover Cover::generated(std::string name, Generator parts, TailPolicy policy, std::function<Spin(std::uint64_t)> min_root,
                       std::optional<GeometricBound> bound) {
    if (policy == TailPolicy::FiniteList) throw std::invalid_argument("generated covers need an infinite tail policy");
    if (policy == TailPolicy::RootExhaustion && !min_root)
        throw std::invalid_argument("root exhaustion needs a min_root function");
    if (policy == TailPolicy::GeometricBound &&
        (!bound || sgn(bound->coefficient) < 0 || sgn(bound->ratio) < 0 || bound->ratio >= 1))
        throw std::invalid_argument("geometric bound needs c >= 0 and 0 <= r < 1");
    Cover c;
    c.name_ = std::move(name);
    c.generator_ = std::move(parts);
    c.policy_ = policy;
    c.min_root_ = std::move(min_root);
    c.bound_ = std::move(bound);
    return c;
}

CylinderSet Cover::part(std::uint64_t i) const {
    if (policy_ == TailPolicy::FiniteList) return parts_.at(i);
    return generator_(i);
}

Cover Cover::root_slices(const CylinderField& f) {
    if (f.spins().is_finite()) {
        std::vector<CylinderSet> parts;
        for (Spin q = 0; q < f.spins().size(); ++q) parts.push_back(f.single_site(0, q));
        return finite("root-slices", std::move(parts));
    }
    return generated(
        "root-slices", [f](std::uint64_t i) { return f.single_site(0, i); }, TailPolicy::RootExhaustion,
        [](std::uint64_t i) { return Spin{i}; });
}

Cover Cover::root_blocks(const CylinderField& f, Spin block) {
    if (block == 0) throw std::invalid_argument("block size must be positive");
    const std::string name = "root-blocks(" + std::to_string(block) + ")";
    auto make = [f, block](std::uint64_t i) {
        std::vector<Spin> values;
        for (Spin q = block * i; q < block * (i + 1); ++q)
            if (f.spins().contains(q)) values.push_back(q);
        return f.from_rectangle(f.make_rectangle({{0, SiteConstraint::in(std::move(values))}}));
    };
    if (f.spins().is_finite()) {
        std::vector<CylinderSet> parts;
        for (std::uint64_t i = 0; block * i < f.spins().size(); ++i) parts.push_back(make(i));
        return finite(name, std::move(parts));
    }
    return generated(name, make, TailPolicy::RootExhaustion, [block](std::uint64_t i) { return block * i; });
}

Cover Cover::atoms(const CylinderField& f, Depth n) {
    if (!f.spins().is_finite()) throw std::invalid_argument("atom covers need finite spins");
    std::vector<CylinderSet> parts;
    for (const Configuration& c : f.atoms(f.universe(), n)) parts.push_back(f.from_configuration(c));
    return finite("atoms(" + std::to_string(n) + ")", std::move(parts));
}

Cover Cover::whole(const CylinderField& f) { return finite("whole", {f.universe()}); }

// ---- conditional families ------------------------------------------------------

ConditionalExtension::ConditionalExtension(ExtensionHandle handle, CylinderSet a)
    : handle_(std::move(handle)), a_(std::move(a)), a_depth_(handle_.field().base_depth(a_)) {
    const Extended m = handle_.mu(a_);
    if (m.is_infinite()) throw std::invalid_argument("conditioning set " + handle_.field().render(a_) + " has infinite mass");
    mass_ = m.finite();
}

Rational ConditionalExtension::value_at(const CylinderSet& e, Depth m) const {
    const CylinderField& f = handle_.field();
    if (m < std::max(a_depth_, f.base_depth(e)))
        throw std::invalid_argument("evaluation depth below max(n_A, n_E)");
    return handle_.mu_at(f.intersect(e, a_), m).finite();
}

Rational ConditionalExtension::value(const CylinderSet& e) const {
    return value_at(e, std::max(a_depth_, handle_.field().base_depth(e)));
}

MeasureFamily ConditionalExtension::family() const {
    const MeasureFamily base = handle_.family();
    const CylinderField f = handle_.field();
    const Depth a_depth = a_depth_;
    const CylinderSet a = a_;
    const Extended factor = handle_.factor();
    MeasureFamily out(
        f,
        [base, f, a, a_depth, factor](Depth k) {
            return VolumeMeasure(f, k, RestrictedForm{base.at(std::max(a_depth, k)), a}, factor);
        },
        mass_ == 1 ? FamilyKind::Probability : FamilyKind::Finite, "conditioned on " + f.render(a));
    out.set_max_depth(handle_.max_depth()).set_closed_form_consistent(base.closed_form_consistent());
    return out;
}

ConditionalExtension conditional_family(const ExtensionHandle& h, const CylinderSet& a) { return {h, a}; }

RestrictionReport restriction_identity_check(const ConditionalExtension& cond, const CylinderSet& wider,
                                             const CylinderSet& e) {
    const CylinderField& f = cond.handle().field();
    if (f.subset(cond.conditioning(), wider) != Decision::Yes)
        throw std::invalid_argument("conditioning set is not certified inside the wider set");
    const ConditionalExtension outer(cond.handle(), wider);
    const CylinderSet e_a = f.intersect(e, cond.conditioning());
    return {cond.value(e), outer.value(e_a), cond.handle().mu(e_a)};
}

// ---- cover sums -----------------------------------------------------------------

namespace {

/// One past the largest root value E admits, when every rectangle pins x0 to a finite set.
std::optional<Spin> root_limit(const CylinderSet& e) {
    Spin limit = 0;
    for (const Rectangle& r : e.rectangles()) {
        const SiteConstraint c = r.at(0);
        if (c.kind() != SiteConstraint::Kind::In) return std::nullopt;
        if (!c.values().empty()) limit = std::max(limit, c.values().back() + 1);
    }
    return limit;
}

Rational abs_diff(const Rational& a, const Rational& b) { return a < b ? Rational(b - a) : Rational(a - b); }

} // namespace

SigmaFiniteExtension::SigmaFiniteExtension(ExtensionHandle handle, Cover cover)
    : handle_(std::move(handle)), cover_(std::move(cover)) {
    if (cover_.is_finite()) {
        const CylinderField& f = handle_.field();
        for (std::size_t i = 0; i < cover_.size(); ++i)
            for (std::size_t j = i + 1; j < cover_.size(); ++j)
                if (f.disjoint(cover_.part(i), cover_.part(j)) != Decision::Yes)
                    throw std::invalid_argument("cover parts " + std::to_string(i) + " and " + std::to_string(j) +
                                                " are not certified disjoint");
    }
}

Rational SigmaFiniteExtension::term(const CylinderSet& e, std::uint64_t i) const {
    return ConditionalExtension(handle_, cover_.part(i)).value(e);
}

SigmaResult SigmaFiniteExtension::evaluate(const CylinderSet& e, const SigmaOptions& options) const {
    SigmaResult result;
    const bool exhaustion = cover_.policy() == TailPolicy::RootExhaustion;
    const std::optional<Spin> limit = exhaustion ? root_limit(e) : std::nullopt;
    const CylinderField& f = handle_.field();
    // Parts j >= i lie in {x0 >= min_root(i)}, so their sum is at most mu(E ∩ {x0 >= min_root(i)}).
    // Once that remainder is infinite it stays infinite.
    bool remainder_finite = exhaustion;
    for (std::uint64_t i = 0;; ++i) {
        if (cover_.is_finite() && i == cover_.size()) {
            result.status = SumStatus::Exact;
            break;
        }
        if (limit && cover_.min_root(i) >= *limit) {
            result.status = SumStatus::Exact;
            break;
        }
        if (remainder_finite && i > 0) {
            std::vector<Spin> below(cover_.min_root(i));
            std::iota(below.begin(), below.end(), Spin{0});
            const CylinderSet rest =
                f.intersect(e, f.from_rectangle(f.make_rectangle({{0, SiteConstraint::not_in(std::move(below))}})));
            const Extended remainder = handle_.mu_at(rest, f.base_depth(rest));
            if (remainder.is_infinite()) {
                remainder_finite = false;
            } else if (remainder.finite() < options.tolerance) {
                result.status = remainder.is_zero() ? SumStatus::Exact : SumStatus::Converged;
                result.tail_bound = remainder.finite();
                break;
            }
        }
        if (const auto& b = cover_.bound(); b && cover_.policy() == TailPolicy::GeometricBound) {
            const Rational tail = b->coefficient * pow(b->ratio, i) / (Rational(1) - b->ratio);
            if (tail < options.tolerance) {
                result.status = SumStatus::Converged;
                result.tail_bound = tail;
                break;
            }
        }
        if (i == options.term_budget) {
            result.status = SumStatus::Inconclusive;
            break;
        }
        result.value += term(e, i);
        ++result.terms;
        if (result.trace.size() < options.trace_limit) result.trace.push_back(result.value);
        if (!cover_.is_finite() && result.value > options.divergence_bound) {
            result.status = SumStatus::DivergesBeyond;
            break;
        }
    }
    return result;
}

SigmaFiniteExtension sigma_extension(const ExtensionHandle& h, const Cover& cover) { return {h, cover}; }

CoverComparison cover_independence(const ExtensionHandle& h, const Cover& c1, const Cover& c2, const CylinderSet& e,
                                   const SigmaOptions& options) {
    CoverComparison out;
    out.first = SigmaFiniteExtension(h, c1).evaluate(e, options);
    out.second = SigmaFiniteExtension(h, c2).evaluate(e, options);
    auto certified = [](const SigmaResult& r) {
        return r.status == SumStatus::Exact || r.status == SumStatus::Converged;
    };
    out.exact = out.first.status == SumStatus::Exact && out.second.status == SumStatus::Exact;
    if (certified(out.first) && certified(out.second))
        out.agree = abs_diff(out.first.value, out.second.value) <= out.first.tail_bound + out.second.tail_bound;
    return out;
}

Condition27Report condition_2_7_check(const ExtensionHandle& h, const Cover& cover, const CylinderSet& e,
                                      const SigmaOptions& options) {
    Condition27Report report;
    report.direct = h.mu(e);
    report.cover_sum = SigmaFiniteExtension(h, cover).evaluate(e, options);
    const SigmaResult& s = report.cover_sum;
    const bool finite_direct = report.direct.is_finite();
    switch (s.status) {
    case SumStatus::Exact:
        report.verdict = report.direct == Extended(s.value) ? Verdict::Pass : Verdict::Fail;
        break;
    case SumStatus::Converged:
        report.verdict = finite_direct && s.value <= report.direct.finite() &&
                                 report.direct.finite() <= s.value + s.tail_bound
                             ? Verdict::Pass
                             : Verdict::Fail;
        break;
    case SumStatus::DivergesBeyond:
    case SumStatus::Inconclusive:
        // Partial sums only grow: exceeding a finite direct value is a counterexample.
        report.verdict = finite_direct && s.value > report.direct.finite() ? Verdict::Fail : Verdict::Inconclusive;
        break;
    }
    return report;
}

// ---- lifted covers and normalization ---------------------------------------------

bool LiftedCover::verified() const {
    return std::none_of(probes.begin(), probes.end(),
                        [](const auto& p) { return p.second.verdict == Verdict::Fail; });
}

LiftedCover theorem_4_3_cover(const ExtensionHandle& h, Depth n0, const Cover& slices, const SigmaOptions& options,
                              std::uint64_t checked_parts) {
    const CylinderField& f = h.field();
    const std::uint64_t count = slices.is_finite() ? slices.size() : checked_parts;
    std::vector<CylinderSet> parts;
    LiftedCover out{slices, {}, {}};
    for (std::uint64_t i = 0; i < count; ++i) {
        CylinderSet s = slices.part(i);
        if (f.base_depth(s) > n0)
            throw std::invalid_argument("slice " + std::to_string(i) + " is not based in V_" + std::to_string(n0));
        const Extended m = h.mu_at(s, n0);
        if (m.is_infinite())
            throw std::invalid_argument("slice " + std::to_string(i) + " (" + f.render(s) + ") has infinite mass");
        out.masses.push_back(m);
        parts.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (std::size_t j = i + 1; j < parts.size(); ++j)
            if (f.disjoint(parts[i], parts[j]) != Decision::Yes)
                throw std::invalid_argument("slices " + std::to_string(i) + " and " + std::to_string(j) +
                                            " are not certified disjoint");
    if (slices.is_finite()) {
        CylinderSet all = f.empty();
        for (const CylinderSet& p : parts) all = f.unite(all, p);
        if (f.semantic_equal(all, f.universe()) != Decision::Yes)
            throw std::invalid_argument("slices do not cover Omega");
    }

    std::vector<CylinderSet> probes{f.universe()};
    const VertexIndex sites = std::min<VertexIndex>(f.tree().ball_size(std::min(n0 + 1, h.max_depth())), 4);
    for (VertexIndex v = 0; v < sites; ++v)
        for (Spin q = 0; q < 2 && f.spins().contains(q); ++q) {
            probes.push_back(f.single_site(v, q));
            if (v != 0 && f.spins().contains(1)) probes.push_back(f.intersect(f.single_site(0, 1), f.single_site(v, q)));
        }
    for (CylinderSet& p : probes) {
        Condition27Report r = condition_2_7_check(h, out.cover, p, options);
        out.probes.emplace_back(std::move(p), std::move(r));
    }
    return out;
}

ExtensionHandle normalized_extension(const MeasureFamily& family, Depth depth) {
    const Extended c = family.at(0)->mass();
    if (c.is_infinite()) throw std::invalid_argument("normalization needs a finite family");
    for (Depth n = 1; n <= depth; ++n)
        if (!(family.at(n)->mass() == c))
            throw std::invalid_argument("mass changes between depth 0 and depth " + std::to_string(n));
    if (c.is_zero()) return ExtensionHandle::make(family, depth);
    return ExtensionHandle::make(scale(family, Rational(1) / c.finite()), depth).scaled(c);
}

} // namespace cayley
