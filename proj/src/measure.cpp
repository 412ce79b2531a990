#include "cayley/measure.hpp"

#include "cayley/random.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>

namespace cayley {

namespace {

using Wide = __int128;

Rational to_rational(Wide v) {
    const bool negative = v < 0;
    unsigned __int128 u = negative ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
    mpz_class hi(static_cast<unsigned long>(static_cast<std::uint64_t>(u >> 64)));
    mpz_class lo(static_cast<unsigned long>(static_cast<std::uint64_t>(u)));
    mpz_class z = (hi << 64) + lo;
    if (negative) z = -z;
    return Rational(z);
}

std::int64_t narrow(Wide v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
        throw std::overflow_error("dense table counts exceed 64 bits");
    return static_cast<std::int64_t>(v);
}

std::int64_t to_int64(const mpz_class& z) {
    if (!z.fits_slong_p()) throw std::overflow_error("scaled weight does not fit 64 bits");
    return z.get_si();
}

Extended pow(const Extended& base, std::uint64_t exponent) {
    if (exponent == 0) return 1;
    if (base.is_infinite()) return Extended::infinity();
    return cayley::pow(base.finite(), exponent);
}

// Message passing for chain measures on V_n. Only constrained vertices and
// their ancestors are visited; unconstrained subtrees use per-level memos.
class ChainEvaluator {
public:
    ChainEvaluator(const CylinderField& field, Depth depth, const MarkovForm& form)
        : field_(field), depth_(depth), form_(form), free_(depth + 1) {}

    Extended mass(const Rectangle& r) {
        if (r.is_empty()) return 0;
        rect_ = &r;
        active_.clear();
        for (const auto& [v, c] : r.entries()) {
            VertexIndex u = v;
            active_.push_back(u);
            while (u != 0) {
                u = field_.tree().parent(u);
                active_.push_back(u);
            }
        }
        std::sort(active_.begin(), active_.end());
        active_.erase(std::unique(active_.begin(), active_.end()), active_.end());
        const SpinFunction g = below(0, 0);
        return weighted_sum(form_.root, r.at(0), g);
    }

private:
    bool active(VertexIndex v) const { return std::binary_search(active_.begin(), active_.end(), v); }

    unsigned child_count(Depth level) const {
        return level == 0 ? field_.tree().order() + 1 : field_.tree().order();
    }

    // Message an unconstrained vertex at `level` sends to its parent.
    const SpinFunction& free_message(Depth level) {
        if (!free_[level]) {
            SpinFunction g = level == depth_ ? form_.boundary : free_message(level + 1).pow(child_count(level));
            free_[level] = propagate(form_.kernel, field_.spins(), SiteConstraint::any(), g).trimmed();
        }
        return *free_[level];
    }

    SpinFunction below(VertexIndex v, Depth level) {
        if (level == depth_) return form_.boundary;
        SpinFunction g = SpinFunction::constant(1);
        unsigned free_children = 0;
        const IndexRange kids = field_.tree().children(v);
        for (VertexIndex c = kids.first; c < kids.last; ++c) {
            if (active(c))
                g *= propagate(form_.kernel, field_.spins(), rect_->at(c), below(c, level + 1)).trimmed();
            else
                ++free_children;
        }
        if (free_children) g *= free_message(level + 1).pow(free_children);
        return g.trimmed();
    }

    const CylinderField& field_;
    Depth depth_;
    const MarkovForm& form_;
    std::vector<std::optional<SpinFunction>> free_;
    const Rectangle* rect_ = nullptr;
    std::vector<VertexIndex> active_;
};

Wide dense_rectangle_sum(const CylinderField& field, Depth depth, const DenseTable& table, const Rectangle& r) {
    const Spin s = field.spins().size();
    const VertexIndex sites = field.tree().ball_size(depth);
    std::vector<std::vector<Spin>> allowed(sites);
    std::vector<std::uint64_t> stride(sites);
    std::uint64_t st = 1;
    for (VertexIndex i = 0; i < sites; ++i) {
        stride[i] = st;
        st *= s;
        const SiteConstraint c = r.at(i);
        for (Spin q = 0; q < s; ++q)
            if (c.admits(q)) allowed[i].push_back(q);
        if (allowed[i].empty()) return 0;
    }
    std::vector<std::size_t> pos(sites, 0);
    std::uint64_t index = 0;
    for (VertexIndex i = 0; i < sites; ++i) index += allowed[i][0] * stride[i];
    Wide total = 0;
    while (true) {
        total += table.counts[index];
        VertexIndex i = 0;
        for (; i < sites; ++i) {
            const auto& a = allowed[i];
            index -= a[pos[i]] * stride[i];
            if (++pos[i] < a.size()) {
                index += a[pos[i]] * stride[i];
                break;
            }
            pos[i] = 0;
            index += a[0] * stride[i];
        }
        if (i == sites) break;
    }
    return total;
}

mpz_class lcm_of_denominators(const std::vector<Rational>& values) {
    mpz_class l = 1;
    for (const Rational& v : values) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den().get_mpz_t());
    return l;
}

VolumeMeasure materialize_chain(const VolumeMeasure& mu, const MarkovForm& m) {
    const CylinderField& field = mu.field();
    const Spin s = field.spins().size();
    const Depth n = mu.depth();
    const std::uint64_t count = field.atom_count(n);
    const VertexIndex sites = field.tree().ball_size(n);
    const VertexIndex first_leaf = n == 0 ? 0 : field.tree().ball_size(n - 1);
    if (mu.scale().is_infinite()) throw std::overflow_error("cannot tabulate an infinite scale");

    std::vector<Rational> root_w, kernel_w, leaf_w;
    for (Spin a = 0; a < s; ++a) {
        root_w.push_back(m.root.at(a));
        for (Spin b = 0; b < s; ++b) kernel_w.push_back(m.kernel.row(a).at(b));
        const Extended& h = m.boundary.at(a);
        if (h.is_infinite()) throw std::overflow_error("cannot tabulate an infinite boundary weight");
        leaf_w.push_back(h.finite());
    }
    const mpz_class d_root = lcm_of_denominators(root_w);
    const mpz_class d_kernel = lcm_of_denominators(kernel_w);
    const mpz_class d_leaf = lcm_of_denominators(leaf_w);
    auto scaled = [](const std::vector<Rational>& w, const mpz_class& d) {
        std::vector<std::int64_t> out;
        for (const Rational& x : w) {
            Rational y = x * d;
            out.push_back(to_int64(y.get_num()));
        }
        return out;
    };
    const auto root_i = scaled(root_w, d_root);
    const auto kernel_i = scaled(kernel_w, d_kernel);
    const auto leaf_i = scaled(leaf_w, d_leaf);

    std::vector<VertexIndex> parent(sites, 0);
    for (VertexIndex t = 1; t < sites; ++t) parent[t] = field.tree().parent(t);
    std::vector<std::uint64_t> stride(sites);
    for (VertexIndex t = 0, st = 1; t < sites; ++t, st *= s) stride[t] = st;

    DenseTable table;
    table.counts.assign(count, 0);
    std::vector<Spin> values(sites, 0);
    auto dfs = [&](auto&& self, VertexIndex t, std::uint64_t index, Wide weight) -> void {
        if (t == sites) {
            table.counts[index] = narrow(weight);
            return;
        }
        for (Spin b = 0; b < s; ++b) {
            Wide w = weight * (t == 0 ? root_i[b] : kernel_i[values[parent[t]] * s + b]);
            if (t >= first_leaf) w *= leaf_i[b];
            if (w == 0) continue;
            narrow(w);
            values[t] = b;
            self(self, t + 1, index + b * stride[t], w);
        }
    };
    dfs(dfs, 0, 0, 1);

    Rational denom = Rational(d_root) * cayley::pow(Rational(d_kernel), sites - 1) *
                     cayley::pow(Rational(d_leaf), sites - first_leaf);
    table.unit = mu.scale().finite() / denom;
    return VolumeMeasure(field, n, std::move(table));
}

VolumeMeasure materialize_generic(const VolumeMeasure& mu) {
    const CylinderField& field = mu.field();
    const Spin s = field.spins().size();
    const std::uint64_t count = field.atom_count(mu.depth());
    const VertexIndex sites = field.tree().ball_size(mu.depth());
    std::vector<Rational> weights;
    weights.reserve(count);
    std::vector<Spin> values(sites, 0);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        const Extended w = mu.atom_weight(values);
        if (w.is_infinite()) throw std::overflow_error("cannot tabulate an infinite atom weight");
        weights.push_back(w.finite());
        for (VertexIndex i = 0; i < sites; ++i) {
            if (++values[i] < s) break;
            values[i] = 0;
        }
    }
    const mpz_class d = lcm_of_denominators(weights);
    DenseTable table;
    table.unit = Rational(1) / Rational(d);
    table.counts.reserve(count);
    for (const Rational& w : weights) {
        Rational y = w * d;
        table.counts.push_back(to_int64(y.get_num()));
    }
    return VolumeMeasure(field, mu.depth(), std::move(table));
}

} // namespace

MarkovForm as_markov(const ProductForm& p, const SpinSet& spins) {
    MarkovForm m;
    m.root = p.weights;
    if (spins.is_finite())
        m.kernel = TransitionKernel(std::vector<WeightSequence>(spins.size(), p.weights));
    else
        m.kernel = TransitionKernel({}, p.weights);
    return m;
}

VolumeMeasure::VolumeMeasure(CylinderField field, Depth depth, Form form, Extended scale)
    : field_(std::move(field)), depth_(depth), form_(std::move(form)), scale_(std::move(scale)) {
    (void)field_.tree().ball_size(depth_);
    if (const auto* t = std::get_if<DenseTable>(&form_)) {
        if (t->counts.size() != field_.atom_count(depth_))
            throw std::invalid_argument("dense table size does not match |Phi|^|V_n|");
        for (auto c : t->counts)
            if (c < 0) throw std::invalid_argument("dense table weights must be non-negative");
    } else if (const auto* m = std::get_if<MarkovForm>(&form_)) {
        validate_weights(m->root, field_.spins(), "root weights");
        validate_kernel(m->kernel, field_.spins());
    } else if (const auto* p = std::get_if<ProductForm>(&form_)) {
        validate_weights(p->weights, field_.spins(), "site weights");
    } else if (const auto* r = std::get_if<RestrictedForm>(&form_)) {
        if (!r->base || r->base->depth() < depth_)
            throw std::invalid_argument("restricted measure needs a base at depth >= its own");
    }
}

Extended VolumeMeasure::rectangle_mass(const Rectangle& r) const {
    if (const auto* t = std::get_if<DenseTable>(&form_))
        return Rational(t->unit * to_rational(dense_rectangle_sum(field_, depth_, *t, r)));
    if (const auto* m = std::get_if<MarkovForm>(&form_)) return ChainEvaluator(field_, depth_, *m).mass(r);
    if (const auto* p = std::get_if<ProductForm>(&form_)) {
        const MarkovForm m = as_markov(*p, field_.spins());
        return ChainEvaluator(field_, depth_, m).mass(r);
    }
    throw std::logic_error("rectangle_mass on a restricted measure");
}

Extended VolumeMeasure::measure_of_base(const CylinderSet& base) const {
    if (field_.base_depth(base) > depth_)
        throw std::invalid_argument("cylinder base lies outside V_" + std::to_string(depth_));
    if (const auto* r = std::get_if<RestrictedForm>(&form_))
        return scale_ * r->base->measure_of_base(field_.intersect(base, r->restriction));
    Extended total = 0;
    if (const auto* m = std::get_if<MarkovForm>(&form_)) {
        ChainEvaluator eval(field_, depth_, *m);
        for (const Rectangle& rect : field_.disjoint_rectangles(base)) total += eval.mass(rect);
    } else if (const auto* p = std::get_if<ProductForm>(&form_)) {
        const MarkovForm chain = as_markov(*p, field_.spins());
        ChainEvaluator eval(field_, depth_, chain);
        for (const Rectangle& rect : field_.disjoint_rectangles(base)) total += eval.mass(rect);
    } else {
        for (const Rectangle& rect : field_.disjoint_rectangles(base)) total += rectangle_mass(rect);
    }
    return scale_ * total;
}

Extended VolumeMeasure::atom_weight(std::span<const Spin> values) const {
    const VertexIndex sites = field_.tree().ball_size(depth_);
    if (values.size() != sites) throw std::invalid_argument("atom must assign exactly the sites of V_n");
    for (Spin q : values)
        if (!field_.spins().contains(q)) throw std::out_of_range("spin " + std::to_string(q) + " out of range");
    if (const auto* t = std::get_if<DenseTable>(&form_)) {
        const Spin s = field_.spins().size();
        std::uint64_t idx = 0;
        for (VertexIndex i = sites; i-- > 0;) idx = idx * s + values[i];
        return scale_ * Extended(t->unit * t->counts[idx]);
    }
    if (const auto* r = std::get_if<RestrictedForm>(&form_)) {
        const CylinderSet atom = field_.from_configuration(Configuration::on_prefix({values.begin(), values.end()}));
        return scale_ * r->base->measure_of_base(field_.intersect(atom, r->restriction));
    }
    MarkovForm chain;
    const MarkovForm* m = std::get_if<MarkovForm>(&form_);
    if (!m) {
        chain = as_markov(std::get<ProductForm>(form_), field_.spins());
        m = &chain;
    }
    const VertexIndex first_leaf = depth_ == 0 ? 0 : field_.tree().ball_size(depth_ - 1);
    Extended w = m->root.at(values[0]);
    for (VertexIndex v = 1; v < sites; ++v) w *= Extended(m->kernel.row(values[field_.tree().parent(v)]).at(values[v]));
    for (VertexIndex v = first_leaf; v < sites; ++v) w *= m->boundary.at(values[v]);
    return scale_ * w;
}

VolumeMeasure VolumeMeasure::scaled(const Extended& c) const {
    return VolumeMeasure(field_, depth_, form_, scale_ * c);
}

bool VolumeMeasure::structurally_equal(const VolumeMeasure& o) const {
    if (depth_ != o.depth_ || !(field_.space() == o.field_.space()) || !(scale_ == o.scale_)) return false;
    if (form_.index() != o.form_.index()) return false;
    if (const auto* r = std::get_if<RestrictedForm>(&form_)) {
        const auto& s = std::get<RestrictedForm>(o.form_);
        return r->restriction == s.restriction &&
               (r->base == s.base || r->base->structurally_equal(*s.base));
    }
    return std::visit(
        [&](const auto& a) -> bool {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, RestrictedForm>) {
                return false;
            } else {
                return a == std::get<T>(o.form_);
            }
        },
        form_);
}

VolumeMeasure project(const VolumeMeasure& mu, Depth i) {
    if (i > mu.depth()) throw std::invalid_argument("projection target must not be deeper than the measure");
    if (i == mu.depth()) return mu;
    const CylinderField& field = mu.field();
    const TreeGeometry& tree = field.tree();
    if (const auto* t = std::get_if<DenseTable>(&mu.form())) {
        const std::uint64_t target = field.atom_count(i);
        std::vector<Wide> acc(target, 0);
        for (std::uint64_t idx = 0; idx < t->counts.size(); ++idx) acc[idx % target] += t->counts[idx];
        DenseTable out;
        out.unit = t->unit;
        out.counts.reserve(target);
        for (Wide v : acc) out.counts.push_back(narrow(v));
        return VolumeMeasure(field, i, std::move(out), mu.scale());
    }
    if (const auto* m = std::get_if<MarkovForm>(&mu.form())) {
        SpinFunction h = m->boundary;
        for (Depth level = mu.depth(); level-- > i;) {
            const unsigned kids = level == 0 ? tree.order() + 1 : tree.order();
            h = propagate(m->kernel, field.spins(), SiteConstraint::any(), h).trimmed().pow(kids).trimmed();
        }
        MarkovForm out = *m;
        out.boundary = h;
        return VolumeMeasure(field, i, std::move(out), mu.scale());
    }
    if (const auto* p = std::get_if<ProductForm>(&mu.form())) {
        const std::uint64_t removed = tree.ball_size(mu.depth()) - tree.ball_size(i);
        return VolumeMeasure(field, i, *p, mu.scale() * pow(p->weights.total(), removed));
    }
    const auto& r = std::get<RestrictedForm>(mu.form());
    return VolumeMeasure(field, i, r, mu.scale());
}

VolumeMeasure materialize(const VolumeMeasure& mu) {
    if (!mu.field().spins().is_finite()) throw EnumerationBudgetError("cannot tabulate a measure over the naturals");
    if (std::holds_alternative<DenseTable>(mu.form())) return mu;
    if (const auto* m = std::get_if<MarkovForm>(&mu.form())) return materialize_chain(mu, *m);
    if (const auto* p = std::get_if<ProductForm>(&mu.form()))
        return materialize_chain(mu, as_markov(*p, mu.field().spins()));
    return materialize_generic(mu);
}

// ---- families ---------------------------------------------------------------

std::string to_string(FamilyKind kind) {
    switch (kind) {
    case FamilyKind::Probability: return "probability";
    case FamilyKind::Finite: return "finite";
    case FamilyKind::SigmaFiniteCandidate: return "sigma-finite-candidate";
    }
    return "unknown";
}

struct MeasureFamily::Cache {
    std::mutex mutex;
    std::map<Depth, std::shared_ptr<const VolumeMeasure>> measures;
};

MeasureFamily::MeasureFamily(CylinderField field, Generator generator, FamilyKind kind, std::string description)
    : field_(std::move(field)),
      generator_(std::move(generator)),
      kind_(kind),
      description_(std::move(description)),
      max_depth_(field_.tree().max_depth()),
      cache_(std::make_shared<Cache>()) {}

MeasureFamily& MeasureFamily::set_max_depth(Depth d) {
    max_depth_ = std::min(d, field_.tree().max_depth());
    return *this;
}

std::shared_ptr<const VolumeMeasure> MeasureFamily::at(Depth n) const {
    if (n > max_depth_)
        throw DepthLimitError("family '" + description_ + "' is defined only up to depth " + std::to_string(max_depth_));
    {
        std::lock_guard lock(cache_->mutex);
        auto it = cache_->measures.find(n);
        if (it != cache_->measures.end()) return it->second;
    }
    auto mu = std::make_shared<const VolumeMeasure>(generator_(n));
    std::lock_guard lock(cache_->mutex);
    return cache_->measures.emplace(n, std::move(mu)).first->second;
}

MeasureFamily markov_family(const CylinderField& field, WeightSequence root, TransitionKernel kernel) {
    validate_weights(root, field.spins(), "root weights");
    validate_kernel(kernel, field.spins());
    const bool stochastic = kernel.is_stochastic();
    const Extended total = root.total();
    FamilyKind kind = total.is_infinite() ? FamilyKind::SigmaFiniteCandidate
                      : stochastic && total == Extended(1) ? FamilyKind::Probability
                                                           : FamilyKind::Finite;
    MarkovForm form{std::move(root), std::move(kernel)};
    MeasureFamily fam(
        field, [field, form](Depth n) { return VolumeMeasure(field, n, form); }, kind, "markov");
    fam.set_closed_form_consistent(stochastic);
    return fam;
}

MeasureFamily product_family(const CylinderField& field, WeightSequence weights) {
    validate_weights(weights, field.spins(), "site weights");
    const Extended total = weights.total();
    const bool consistent = total == Extended(1) || total.is_zero();
    FamilyKind kind = total.is_infinite()       ? FamilyKind::SigmaFiniteCandidate
                      : total == Extended(1)    ? FamilyKind::Probability
                                                : FamilyKind::Finite;
    ProductForm form{std::move(weights)};
    MeasureFamily fam(
        field, [field, form](Depth n) { return VolumeMeasure(field, n, form); }, kind, "product");
    fam.set_closed_form_consistent(consistent);
    return fam;
}

MeasureFamily scale(const MeasureFamily& family, const Rational& c) {
    if (sgn(c) <= 0) throw std::invalid_argument("scale factor must be positive");
    FamilyKind kind = family.kind();
    if (kind == FamilyKind::Probability && c != 1) kind = FamilyKind::Finite;
    MeasureFamily out(
        family.field(), [family, c](Depth n) { return family.at(n)->scaled(c); }, kind,
        family.description() + " scaled by " + to_string(c));
    out.set_max_depth(family.max_depth())
        .set_closed_form_consistent(family.closed_form_consistent())
        .set_declared_consistent_to(family.declared_consistent_to());
    return out;
}

MeasureFamily table_family(const VolumeMeasure& table) {
    if (!std::holds_alternative<DenseTable>(table.form()))
        throw std::invalid_argument("table_family needs a dense table");
    auto top = std::make_shared<const VolumeMeasure>(table);
    const Extended mass = table.mass();
    const FamilyKind kind = mass == Extended(1) ? FamilyKind::Probability : FamilyKind::Finite;
    MeasureFamily fam(
        table.field(), [top](Depth n) { return project(*top, n); }, kind,
        "table at depth " + std::to_string(table.depth()));
    fam.set_max_depth(table.depth()).set_declared_consistent_to(table.depth());
    return fam;
}

MeasureFamily random_consistent_family(const CylinderField& field, std::uint64_t seed, Depth depth) {
    const std::uint64_t count = field.atom_count(depth);
    SplitMix64 rng(seed);
    DenseTable t;
    t.counts.resize(count);
    std::int64_t total = 0;
    for (auto& c : t.counts) {
        c = static_cast<std::int64_t>(rng.below(16));
        total += c;
    }
    if (total == 0) {
        t.counts[0] = 1;
        total = 1;
    }
    t.unit = Rational(1, static_cast<unsigned long>(total));
    auto fam = table_family(VolumeMeasure(field, depth, std::move(t)));
    return fam;
}

// ---- consistency ------------------------------------------------------------

namespace {

struct PairOutcome {
    std::optional<ConsistencyViolation> violation;
    bool exact = true;
};

std::vector<CylinderSet> probe_cylinders(const CylinderField& field, Depth depth) {
    std::vector<CylinderSet> probes{field.universe()};
    const Spin range = field.spins().is_finite() ? field.spins().size() : 8;
    const VertexIndex sites = std::min<VertexIndex>(field.tree().ball_size(depth), 16);
    for (VertexIndex v = 0; v < sites; ++v)
        for (Spin q = 0; q < range; ++q) probes.push_back(field.single_site(v, q));
    return probes;
}

PairOutcome compare_pair(const VolumeMeasure& projected, const VolumeMeasure& direct, Depth i, Depth j) {
    const CylinderField& field = direct.field();
    PairOutcome out;
    if (field.spins().is_finite()) {
        std::optional<std::uint64_t> count;
        try {
            count = field.atom_count(i);
        } catch (const EnumerationBudgetError&) {
        }
        if (count) {
            const Spin s = field.spins().size();
            const VertexIndex sites = field.tree().ball_size(i);
            std::vector<Spin> values(sites, 0);
            for (std::uint64_t idx = 0; idx < *count; ++idx) {
                const Extended lhs = projected.atom_weight(values);
                const Extended rhs = direct.atom_weight(values);
                if (!(lhs == rhs)) {
                    out.violation = ConsistencyViolation{
                        i, j, field.from_configuration(Configuration::on_prefix(values)), lhs, rhs};
                    return out;
                }
                for (VertexIndex v = 0; v < sites; ++v) {
                    if (++values[v] < s) break;
                    values[v] = 0;
                }
            }
            return out;
        }
    }
    if (projected.structurally_equal(direct)) return out;
    for (const CylinderSet& probe : probe_cylinders(field, i)) {
        const Extended lhs = projected.measure_of_base(probe);
        const Extended rhs = direct.measure_of_base(probe);
        if (!(lhs == rhs)) {
            out.violation = ConsistencyViolation{i, j, probe, lhs, rhs};
            return out;
        }
    }
    out.exact = false;
    return out;
}

} // namespace

ConsistencyReport check_consistency(const MeasureFamily& family, Depth depth) {
    ConsistencyReport report;
    report.requested = depth;
    try {
        for (Depth j = 1; j <= depth; ++j) {
            const auto fine = family.at(j);
            for (Depth i = 0; i < j; ++i) {
                const VolumeMeasure projected = project(*fine, i);
                PairOutcome outcome = compare_pair(projected, *family.at(i), i, j);
                report.exact = report.exact && outcome.exact;
                if (outcome.violation) {
                    report.violation = std::move(outcome.violation);
                    return report;
                }
            }
            report.consistent_to = j;
        }
    } catch (const DepthLimitError&) {
        report.budget_exceeded = true;
    } catch (const EnumerationBudgetError&) {
        report.budget_exceeded = true;
    }
    return report;
}

} // namespace cayley
