#include "cayley/cylinder.hpp"

#include <algorithm>
#include <iterator>
#include <sstream>

namespace cayley {

namespace {

std::vector<Spin> sorted_unique(std::vector<Spin> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<Spin> set_and(const std::vector<Spin>& a, const std::vector<Spin>& b) {
    std::vector<Spin> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<Spin> set_or(const std::vector<Spin>& a, const std::vector<Spin>& b) {
    std::vector<Spin> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<Spin> set_minus(const std::vector<Spin>& a, const std::vector<Spin>& b) {
    std::vector<Spin> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool includes(const std::vector<Spin>& a, const std::vector<Spin>& sub) {
    return std::includes(a.begin(), a.end(), sub.begin(), sub.end());
}

std::string render_values(const std::vector<Spin>& values) {
    std::string out = "{";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(values[i]);
    }
    return out + "}";
}

} // namespace

SpinSet SpinSet::finite(Spin size) {
    if (size < 1) throw std::invalid_argument("finite spin set needs at least one value");
    return SpinSet(size, true);
}

Spin SpinSet::size() const {
    if (!finite_) throw std::logic_error("the naturals have no finite size");
    return size_;
}

Configuration::Configuration(std::vector<std::pair<VertexIndex, Spin>> assignment)
    : assignment_(std::move(assignment)) {
    std::sort(assignment_.begin(), assignment_.end());
    for (std::size_t i = 1; i < assignment_.size(); ++i)
        if (assignment_[i].first == assignment_[i - 1].first)
            throw std::invalid_argument("configuration assigns vertex " + std::to_string(assignment_[i].first) +
                                        " twice");
}

Configuration Configuration::on_prefix(std::vector<Spin> values) {
    Configuration c;
    c.assignment_.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) c.assignment_.emplace_back(i, values[i]);
    return c;
}

std::optional<Spin> Configuration::value(VertexIndex v) const {
    auto it = std::lower_bound(assignment_.begin(), assignment_.end(), std::pair<VertexIndex, Spin>{v, 0});
    if (it == assignment_.end() || it->first != v) return std::nullopt;
    return it->second;
}

bool Configuration::covers_prefix(VertexIndex count) const {
    if (assignment_.size() < count) return false;
    return count == 0 || assignment_[count - 1].first == count - 1;
}

std::vector<Spin> Configuration::prefix_values(VertexIndex count) const {
    if (!covers_prefix(count)) throw std::invalid_argument("configuration does not cover the requested prefix");
    std::vector<Spin> out(count);
    for (VertexIndex i = 0; i < count; ++i) out[i] = assignment_[i].second;
    return out;
}

SiteConstraint::SiteConstraint(Kind kind, std::vector<Spin> values) : kind_(kind), values_(sorted_unique(std::move(values))) {
    if (kind_ == Kind::Any) values_.clear();
}

bool SiteConstraint::admits(Spin q) const {
    const bool listed = std::binary_search(values_.begin(), values_.end(), q);
    switch (kind_) {
    case Kind::Any: return true;
    case Kind::In: return listed;
    case Kind::NotIn: return !listed;
    }
    return false;
}

SiteConstraint Rectangle::at(VertexIndex v) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), v,
                               [](const Entry& e, VertexIndex x) { return e.first < x; });
    if (it == entries_.end() || it->first != v) return SiteConstraint::any();
    return it->second;
}

bool Rectangle::is_empty() const {
    return std::any_of(entries_.begin(), entries_.end(), [](const Entry& e) { return e.second.is_empty(); });
}

std::optional<VertexIndex> Rectangle::max_vertex() const {
    if (entries_.empty()) return std::nullopt;
    return entries_.back().first;
}

CylinderField::CylinderField(Space space, std::size_t rectangle_budget, std::uint64_t atom_budget)
    : space_(std::move(space)), rectangle_budget_(rectangle_budget), atom_budget_(atom_budget) {}

void CylinderField::check_spin(Spin q) const {
    if (!spins().contains(q))
        throw std::out_of_range("spin " + std::to_string(q) + " out of range");
}

void CylinderField::check_vertex(VertexIndex v) const { (void)tree().level(v); }

// ---- site constraints -------------------------------------------------------

SiteConstraint CylinderField::normalize(const SiteConstraint& c) const {
    using K = SiteConstraint::Kind;
    if (spins().is_finite()) {
        const Spin s = spins().size();
        if (c.kind() == K::Any) return c;
        std::vector<Spin> allowed;
        if (c.kind() == K::In) {
            for (Spin q : c.values()) check_spin(q);
            allowed = c.values();
        } else {
            for (Spin q = 0; q < s; ++q)
                if (!std::binary_search(c.values().begin(), c.values().end(), q)) allowed.push_back(q);
        }
        if (allowed.size() == s) return SiteConstraint::any();
        return SiteConstraint::in(std::move(allowed));
    }
    if (c.kind() == K::NotIn && c.values().empty()) return SiteConstraint::any();
    return c;
}

SiteConstraint CylinderField::intersect(const SiteConstraint& a, const SiteConstraint& b) const {
    using K = SiteConstraint::Kind;
    if (a.kind() == K::Any) return b;
    if (b.kind() == K::Any) return a;
    if (a.kind() == K::In && b.kind() == K::In) return SiteConstraint::in(set_and(a.values(), b.values()));
    if (a.kind() == K::In) return SiteConstraint::in(set_minus(a.values(), b.values()));
    if (b.kind() == K::In) return SiteConstraint::in(set_minus(b.values(), a.values()));
    return normalize(SiteConstraint::not_in(set_or(a.values(), b.values())));
}

SiteConstraint CylinderField::unite(const SiteConstraint& a, const SiteConstraint& b) const {
    using K = SiteConstraint::Kind;
    if (a.kind() == K::Any || b.kind() == K::Any) return SiteConstraint::any();
    if (a.kind() == K::In && b.kind() == K::In) return normalize(SiteConstraint::in(set_or(a.values(), b.values())));
    if (a.kind() == K::In) return normalize(SiteConstraint::not_in(set_minus(b.values(), a.values())));
    if (b.kind() == K::In) return normalize(SiteConstraint::not_in(set_minus(a.values(), b.values())));
    return normalize(SiteConstraint::not_in(set_and(a.values(), b.values())));
}

SiteConstraint CylinderField::complement(const SiteConstraint& c) const {
    using K = SiteConstraint::Kind;
    switch (c.kind()) {
    case K::Any: return SiteConstraint::in({});
    case K::In: return normalize(SiteConstraint::not_in(c.values()));
    case K::NotIn: return SiteConstraint::in(c.values());
    }
    return c;
}

bool CylinderField::subset(const SiteConstraint& a, const SiteConstraint& b) const {
    using K = SiteConstraint::Kind;
    if (a.is_empty() || b.kind() == K::Any) return true;
    if (a.kind() == K::Any) return false;
    if (a.kind() == K::In && b.kind() == K::In) return includes(b.values(), a.values());
    if (a.kind() == K::In) return set_and(a.values(), b.values()).empty();
    if (b.kind() == K::In) return false;  // cofinite inside finite
    return includes(a.values(), b.values());
}

// ---- rectangles -------------------------------------------------------------

Rectangle CylinderField::make_rectangle(std::vector<Rectangle::Entry> entries) const {
    std::sort(entries.begin(), entries.end(),
              [](const Rectangle::Entry& x, const Rectangle::Entry& y) { return x.first < y.first; });
    Rectangle r;
    for (auto& [v, c] : entries) {
        check_vertex(v);
        SiteConstraint n = normalize(c);
        if (!r.entries_.empty() && r.entries_.back().first == v) {
            r.entries_.back().second = intersect(r.entries_.back().second, n);
            if (r.entries_.back().second.kind() == SiteConstraint::Kind::Any) r.entries_.pop_back();
            continue;
        }
        if (n.kind() != SiteConstraint::Kind::Any) r.entries_.emplace_back(v, std::move(n));
    }
    return r;
}

Rectangle CylinderField::intersect(const Rectangle& a, const Rectangle& b) const {
    Rectangle out;
    auto i = a.entries_.begin();
    auto j = b.entries_.begin();
    while (i != a.entries_.end() || j != b.entries_.end()) {
        if (j == b.entries_.end() || (i != a.entries_.end() && i->first < j->first)) {
            out.entries_.push_back(*i++);
        } else if (i == a.entries_.end() || j->first < i->first) {
            out.entries_.push_back(*j++);
        } else {
            SiteConstraint c = intersect(i->second, j->second);
            if (c.kind() != SiteConstraint::Kind::Any) out.entries_.emplace_back(i->first, std::move(c));
            ++i;
            ++j;
        }
    }
    return out;
}

std::vector<Rectangle> CylinderField::complement(const Rectangle& r) const {
    if (r.is_empty()) return {Rectangle{}};
    std::vector<Rectangle> out;
    for (std::size_t i = 0; i < r.entries_.size(); ++i) {
        Rectangle piece;
        piece.entries_.assign(r.entries_.begin(), r.entries_.begin() + static_cast<std::ptrdiff_t>(i));
        piece.entries_.emplace_back(r.entries_[i].first, complement(r.entries_[i].second));
        if (!piece.is_empty()) out.push_back(std::move(piece));
    }
    return out;
}

bool CylinderField::subset(const Rectangle& a, const Rectangle& b) const {
    if (a.is_empty()) return true;
    if (b.is_empty()) return false;
    for (const auto& [v, cb] : b.entries_)
        if (!subset(a.at(v), cb)) return false;
    return true;
}

std::vector<Rectangle> CylinderField::subtract(const Rectangle& r, const Rectangle& s) const {
    std::vector<Rectangle> out;
    if (r.is_empty()) return out;
    if (intersect(r, s).is_empty()) return {r};
    for (const Rectangle& piece : complement(s)) {
        Rectangle x = intersect(r, piece);
        if (!x.is_empty()) out.push_back(std::move(x));
    }
    return out;
}

// ---- canonical unions -------------------------------------------------------

namespace {

// Index of the single vertex at which a and b differ, or npos when they are
// equal or differ at more than one vertex.
constexpr std::size_t npos = static_cast<std::size_t>(-1);

std::pair<std::size_t, VertexIndex> single_difference(const Rectangle& a, const Rectangle& b) {
    const auto& ea = a.entries();
    const auto& eb = b.entries();
    std::size_t diffs = 0;
    VertexIndex where = 0;
    auto i = ea.begin();
    auto j = eb.begin();
    while (i != ea.end() || j != eb.end()) {
        if (j == eb.end() || (i != ea.end() && i->first < j->first)) {
            ++diffs;
            where = i->first;
            ++i;
        } else if (i == ea.end() || j->first < i->first) {
            ++diffs;
            where = j->first;
            ++j;
        } else {
            if (!(i->second == j->second)) {
                ++diffs;
                where = i->first;
            }
            ++i;
            ++j;
        }
        if (diffs > 1) return {npos, 0};
    }
    return {diffs, where};
}

} // namespace

CylinderSet CylinderField::canonical(std::vector<Rectangle> rs) const {
    std::erase_if(rs, [](const Rectangle& r) { return r.is_empty(); });
    if (rs.size() > rectangle_budget_)
        throw NormalizationBudgetError("cylinder normalization exceeded " + std::to_string(rectangle_budget_) +
                                       " rectangles");
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());

    // Quadratic simplification passes are skipped for very large unions.
    constexpr std::size_t simplify_limit = 512;
    bool changed = rs.size() <= simplify_limit;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < rs.size() && !changed; ++i) {
            for (std::size_t j = 0; j < rs.size() && !changed; ++j) {
                if (i == j) continue;
                if (subset(rs[i], rs[j])) {
                    rs.erase(rs.begin() + static_cast<std::ptrdiff_t>(i));
                    changed = true;
                    break;
                }
                if (j < i) continue;
                auto [diffs, v] = single_difference(rs[i], rs[j]);
                if (diffs != 1) continue;
                std::vector<Rectangle::Entry> entries = rs[i].entries();
                std::erase_if(entries, [v = v](const Rectangle::Entry& e) { return e.first == v; });
                SiteConstraint merged = unite(rs[i].at(v), rs[j].at(v));
                if (merged.kind() != SiteConstraint::Kind::Any) entries.emplace_back(v, merged);
                Rectangle m;
                m.entries_ = std::move(entries);
                std::sort(m.entries_.begin(), m.entries_.end(),
                          [](const Rectangle::Entry& x, const Rectangle::Entry& y) { return x.first < y.first; });
                rs.erase(rs.begin() + static_cast<std::ptrdiff_t>(j));
                rs.erase(rs.begin() + static_cast<std::ptrdiff_t>(i));
                rs.push_back(std::move(m));
                changed = true;
            }
        }
        if (changed) {
            std::sort(rs.begin(), rs.end());
            rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
        }
    }
    CylinderSet out;
    out.rectangles_ = std::move(rs);
    return out;
}

CylinderSet CylinderField::universe() const { return canonical({Rectangle{}}); }

CylinderSet CylinderField::single_site(VertexIndex m, Spin q) const {
    check_spin(q);
    return from_rectangle(make_rectangle({{m, SiteConstraint::in({q})}}));
}

CylinderSet CylinderField::from_rectangle(Rectangle r) const { return canonical({std::move(r)}); }

CylinderSet CylinderField::from_rectangles(std::vector<Rectangle> rs) const { return canonical(std::move(rs)); }

CylinderSet CylinderField::from_configuration(const Configuration& c) const {
    std::vector<Rectangle::Entry> entries;
    for (const auto& [v, q] : c.assignment()) {
        check_spin(q);
        entries.emplace_back(v, SiteConstraint::in({q}));
    }
    return from_rectangle(make_rectangle(std::move(entries)));
}

CylinderSet CylinderField::intersect(const CylinderSet& a, const CylinderSet& b) const {
    std::vector<Rectangle> out;
    for (const Rectangle& x : a.rectangles_)
        for (const Rectangle& y : b.rectangles_) {
            Rectangle r = intersect(x, y);
            if (r.is_empty()) continue;
            out.push_back(std::move(r));
            if (out.size() > rectangle_budget_)
                throw NormalizationBudgetError("intersection exceeded the rectangle budget");
        }
    return canonical(std::move(out));
}

CylinderSet CylinderField::unite(const CylinderSet& a, const CylinderSet& b) const {
    std::vector<Rectangle> out = a.rectangles_;
    out.insert(out.end(), b.rectangles_.begin(), b.rectangles_.end());
    return canonical(std::move(out));
}

CylinderSet CylinderField::complement(const CylinderSet& a) const {
    CylinderSet result = universe();
    for (const Rectangle& r : a.rectangles_) {
        result = intersect(result, canonical(complement(r)));
        if (result.is_empty()) break;
    }
    return result;
}

CylinderSet CylinderField::difference(const CylinderSet& a, const CylinderSet& b) const {
    std::vector<Rectangle> out;
    for (const Rectangle& r : a.rectangles_) {
        std::vector<Rectangle> pieces{r};
        for (const Rectangle& s : b.rectangles_) {
            std::vector<Rectangle> next;
            for (const Rectangle& p : pieces) {
                auto sub = subtract(p, s);
                next.insert(next.end(), std::make_move_iterator(sub.begin()), std::make_move_iterator(sub.end()));
            }
            if (next.size() > rectangle_budget_)
                throw NormalizationBudgetError("difference exceeded the rectangle budget");
            pieces = std::move(next);
            if (pieces.empty()) break;
        }
        out.insert(out.end(), std::make_move_iterator(pieces.begin()), std::make_move_iterator(pieces.end()));
    }
    return canonical(std::move(out));
}

Decision CylinderField::subset(const CylinderSet& a, const CylinderSet& b) const {
    try {
        return difference(a, b).is_empty() ? Decision::Yes : Decision::No;
    } catch (const NormalizationBudgetError&) {
    }
    if (spins().is_finite()) {
        try {
            const Depth n = std::max(base_depth(a), base_depth(b));
            const auto ma = atom_mask(a, n);
            const auto mb = atom_mask(b, n);
            for (std::size_t i = 0; i < ma.size(); ++i)
                if (ma[i] && !mb[i]) return Decision::No;
            return Decision::Yes;
        } catch (const EnumerationBudgetError&) {
        }
    }
    return Decision::Undecided;
}

Decision CylinderField::semantic_equal(const CylinderSet& a, const CylinderSet& b) const {
    const Decision ab = subset(a, b);
    if (ab != Decision::Yes) return ab;
    return subset(b, a);
}

Decision CylinderField::disjoint(const CylinderSet& a, const CylinderSet& b) const {
    for (const Rectangle& x : a.rectangles_)
        for (const Rectangle& y : b.rectangles_)
            if (!intersect(x, y).is_empty()) return Decision::No;
    return Decision::Yes;
}

Depth CylinderField::base_depth(const Rectangle& r) const {
    auto v = r.max_vertex();
    return v ? tree().level(*v) : 0;
}

Depth CylinderField::base_depth(const CylinderSet& c) const {
    Depth d = 0;
    for (const Rectangle& r : c.rectangles_) d = std::max(d, base_depth(r));
    return d;
}

std::vector<Rectangle> CylinderField::disjoint_rectangles(const CylinderSet& c) const {
    std::vector<Rectangle> out;
    const auto& rs = c.rectangles_;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        std::vector<Rectangle> pieces{rs[i]};
        for (std::size_t j = 0; j < i && !pieces.empty(); ++j) {
            std::vector<Rectangle> next;
            for (const Rectangle& p : pieces) {
                auto sub = subtract(p, rs[j]);
                next.insert(next.end(), std::make_move_iterator(sub.begin()), std::make_move_iterator(sub.end()));
            }
            if (next.size() > rectangle_budget_)
                throw NormalizationBudgetError("disjoint decomposition exceeded the rectangle budget");
            pieces = std::move(next);
        }
        out.insert(out.end(), std::make_move_iterator(pieces.begin()), std::make_move_iterator(pieces.end()));
    }
    return out;
}

bool CylinderField::contains(const Rectangle& r, std::span<const Spin> prefix) const {
    for (const auto& [v, c] : r.entries_) {
        if (v >= prefix.size()) throw std::invalid_argument("configuration does not assign a constrained site");
        if (!c.admits(prefix[v])) return false;
    }
    return true;
}

bool CylinderField::contains(const CylinderSet& c, const Configuration& sigma) const {
    for (const Rectangle& r : c.rectangles_) {
        bool inside = true;
        for (const auto& [v, sc] : r.entries_) {
            auto q = sigma.value(v);
            if (!q) throw std::invalid_argument("configuration does not assign constrained site x" + std::to_string(v));
            if (!sc.admits(*q)) {
                inside = false;
                break;
            }
        }
        if (inside) return true;
    }
    return false;
}

std::uint64_t CylinderField::atom_count(Depth n) const {
    if (!spins().is_finite()) throw EnumerationBudgetError("atoms are not enumerable over the naturals");
    const Spin s = spins().size();
    const VertexIndex sites = tree().ball_size(n);
    std::uint64_t count = 1;
    for (VertexIndex i = 0; i < sites; ++i) {
        if (count > atom_budget_ / s)
            throw EnumerationBudgetError("|Phi|^|V_" + std::to_string(n) + "| exceeds the atom budget");
        count *= s;
    }
    if (count > atom_budget_) throw EnumerationBudgetError("atom budget exceeded");
    return count;
}

std::vector<bool> CylinderField::atom_mask(const CylinderSet& c, Depth n) const {
    if (base_depth(c) > n) throw std::invalid_argument("cylinder base lies outside V_n");
    const std::uint64_t count = atom_count(n);
    const Spin s = spins().size();
    const VertexIndex sites = tree().ball_size(n);
    std::vector<bool> mask(count, false);
    std::vector<Spin> values(sites, 0);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        for (const Rectangle& r : c.rectangles_)
            if (contains(r, values)) {
                mask[idx] = true;
                break;
            }
        for (VertexIndex i = 0; i < sites; ++i) {
            if (++values[i] < s) break;
            values[i] = 0;
        }
    }
    return mask;
}

std::vector<Configuration> CylinderField::atoms(const CylinderSet& c, Depth n) const {
    const auto mask = atom_mask(c, n);
    const Spin s = spins().size();
    const VertexIndex sites = tree().ball_size(n);
    std::vector<Configuration> out;
    for (std::uint64_t idx = 0; idx < mask.size(); ++idx) {
        if (!mask[idx]) continue;
        std::vector<Spin> values(sites);
        std::uint64_t rest = idx;
        for (VertexIndex i = 0; i < sites; ++i) {
            values[i] = rest % s;
            rest /= s;
        }
        out.push_back(Configuration::on_prefix(std::move(values)));
    }
    return out;
}

std::string CylinderField::render(const Rectangle& r) const {
    if (r.is_universe()) return "all";
    std::ostringstream os;
    for (std::size_t i = 0; i < r.entries_.size(); ++i) {
        if (i) os << " & ";
        const auto& [v, c] = r.entries_[i];
        os << 'x' << v;
        if (c.kind() == SiteConstraint::Kind::In && c.values().size() == 1)
            os << '=' << c.values().front();
        else if (c.kind() == SiteConstraint::Kind::In)
            os << " in " << render_values(c.values());
        else
            os << " notin " << render_values(c.values());
    }
    return os.str();
}

std::string CylinderField::render(const CylinderSet& c) const {
    if (c.rectangles_.empty()) return "none";
    std::string out;
    for (std::size_t i = 0; i < c.rectangles_.size(); ++i) {
        if (i) out += " | ";
        out += render(c.rectangles_[i]);
    }
    return out;
}

RhoResult CylinderField::rho(const Configuration& a, const Configuration& b, Depth truncation,
                             bool equal_beyond) const {
    const VertexIndex count = tree().ball_size(truncation);
    const auto va = a.prefix_values(count);
    const auto vb = b.prefix_values(count);
    RhoResult out{0, 0};
    for (VertexIndex n = 0; n < count; ++n)
        if (va[n] != vb[n]) out.partial += Rational(1, 1) / pow(Rational(2), n);
    if (!equal_beyond) out.tail_bound = Rational(2) / pow(Rational(2), count);
    return out;
}

GeneratorPair CylinderField::generator_decomposition(VertexIndex m, Spin q, Depth n) const {
    check_spin(q);
    if (tree().level(m) > n) throw std::invalid_argument("x_m must lie in V_n");
    GeneratorPair out;
    if (spins().is_finite() && spins().size() == 1) {
        out.omega = out.nu = Configuration::on_prefix(std::vector<Spin>(tree().ball_size(n), 0));
        out.first = out.second = universe();
        out.degenerate = true;
        return out;
    }
    const VertexIndex sites = tree().ball_size(n);
    if (sites < 2) throw std::invalid_argument("generator decomposition needs |V_n| >= 2");
    std::vector<Spin> w(sites, 0), u(sites, 1);
    w[m] = u[m] = q;
    out.omega = Configuration::on_prefix(w);
    out.nu = Configuration::on_prefix(u);
    // Each generator is {x_m = q} joined with the point cylinder that fixes
    // the defining configuration away from x_m.
    auto cross = [&](const std::vector<Spin>& values) {
        std::vector<Rectangle::Entry> rest;
        for (VertexIndex i = 0; i < sites; ++i)
            if (i != m) rest.emplace_back(i, SiteConstraint::in({values[i]}));
        return unite(single_site(m, q), from_rectangle(make_rectangle(std::move(rest))));
    };
    out.first = cross(w);
    out.second = cross(u);
    return out;
}

} // namespace cayley
