#include "cayley/extension.hpp"

#include <map>
#include <mutex>
#include <numeric>

namespace cayley {

struct ExtensionHandle::Cache {
    std::mutex mutex;
    std::map<std::string, Extended> values;
};

ExtensionHandle::ExtensionHandle(MeasureFamily family, bool trusted, Depth verified_depth)
    : family_(std::move(family)), trusted_(trusted), verified_depth_(verified_depth), cache_(std::make_shared<Cache>()) {}

ExtensionHandle ExtensionHandle::verified(MeasureFamily family, Depth depth) {
    ConsistencyReport report = check_consistency(family, depth);
    if (!report.passed()) {
        std::string why = report.violation ? "family is not consistent: mu_" + std::to_string(report.violation->fine) +
                                                 " does not project onto mu_" +
                                                 std::to_string(report.violation->coarse)
                                           : "consistency audit stopped at depth " +
                                                 std::to_string(report.consistent_to);
        throw ConsistencyError(why, std::move(report));
    }
    return ExtensionHandle(std::move(family), false, depth);
}

ExtensionHandle ExtensionHandle::trusted(MeasureFamily family) {
    if (!family.closed_form_consistent())
        throw std::invalid_argument("family '" + family.description() + "' is not consistent by construction");
    const Depth d = family.max_depth();
    return ExtensionHandle(std::move(family), true, d);
}

ExtensionHandle ExtensionHandle::make(MeasureFamily family, Depth depth) {
    if (family.closed_form_consistent()) return trusted(std::move(family));
    return verified(std::move(family), depth);
}

Depth ExtensionHandle::max_depth() const { return trusted_ ? family_.max_depth() : verified_depth_; }

ExtensionHandle ExtensionHandle::scaled(const Extended& c) const {
    ExtensionHandle out(family_, trusted_, verified_depth_);
    out.factor_ = factor_ * c;
    return out;
}

void ExtensionHandle::check_depth(Depth n) const {
    if (n > max_depth())
        throw std::out_of_range("depth " + std::to_string(n) + " lies beyond the verified depth " +
                                std::to_string(max_depth()));
}

Extended ExtensionHandle::mu_at(const CylinderSet& e, Depth n) const {
    check_depth(n);
    return factor_ * family_.at(n)->measure_of_base(e);
}

Extended ExtensionHandle::mu(const CylinderSet& e) const {
    const Depth n = field().base_depth(e);
    check_depth(n);
    const std::string key = field().render(e);
    {
        std::lock_guard lock(cache_->mutex);
        auto it = cache_->values.find(key);
        if (it != cache_->values.end()) return factor_ * it->second;
    }
    const Extended value = family_.at(n)->measure_of_base(e);
    std::lock_guard lock(cache_->mutex);
    cache_->values.emplace(key, value);
    return factor_ * value;
}

AdditivityReport additivity_check(const ExtensionHandle& h, const std::vector<CylinderSet>& parts) {
    const CylinderField& f = h.field();
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (std::size_t j = i + 1; j < parts.size(); ++j)
            if (f.disjoint(parts[i], parts[j]) != Decision::Yes)
                throw std::invalid_argument("parts " + std::to_string(i) + " and " + std::to_string(j) +
                                            " are not certified disjoint");
    AdditivityReport report;
    CylinderSet all = f.empty();
    report.parts_sum = 0;
    for (const CylinderSet& p : parts) {
        report.part_values.push_back(h.mu(p));
        report.parts_sum += report.part_values.back();
        all = f.unite(all, p);
    }
    report.union_value = h.mu(all);
    return report;
}

std::string to_string(ContinuityVerdict v) {
    switch (v) {
    case ContinuityVerdict::CertifiedEmpty: return "certified-empty";
    case ContinuityVerdict::DecayedBelowThreshold: return "decayed-below-threshold";
    case ContinuityVerdict::Decreasing: return "decreasing";
    case ContinuityVerdict::Stationary: return "stationary";
    }
    return "unknown";
}

ContinuityReport continuity_probe(const ExtensionHandle& h, const std::function<CylinderSet(Depth)>& seq, Depth max_n,
                                  const Rational& threshold) {
    const CylinderField& f = h.field();
    ContinuityReport report;
    std::optional<CylinderSet> previous;
    for (Depth n = 0; n <= max_n; ++n) {
        CylinderSet current = seq(n);
        if (previous && f.subset(current, *previous) != Decision::Yes)
            throw std::invalid_argument("sequence is not certified decreasing at depth " + std::to_string(n));
        if (current.is_empty() && !report.empty_from) report.empty_from = n;
        const Depth at = std::max(n, f.base_depth(current));
        report.values.emplace_back(n, h.mu_at(current, at));
        if (report.values.size() > 1 && report.values[report.values.size() - 2].second < report.values.back().second)
            report.non_increasing = false;
        previous = std::move(current);
    }
    if (report.empty_from) {
        report.verdict = ContinuityVerdict::CertifiedEmpty;
    } else if (report.values.size() < 2 ||
               report.values.back().second == report.values[report.values.size() - 2].second) {
        report.verdict = ContinuityVerdict::Stationary;
    } else if (report.values.back().second < Extended(threshold)) {
        report.verdict = ContinuityVerdict::DecayedBelowThreshold;
    } else {
        report.verdict = ContinuityVerdict::Decreasing;
    }
    return report;
}

InnerApprox inner_compact_approx(const ExtensionHandle& h, const CylinderSet& e, const Rational& eps) {
    if (sgn(eps) <= 0) throw std::invalid_argument("epsilon must be positive");
    const CylinderField& f = h.field();
    const Extended total = h.mu(e);
    if (total.is_infinite()) throw std::invalid_argument("finite mass required");
    if (f.spins().is_finite() || e.is_empty()) return {e, 0, std::nullopt};

    const Depth d = f.base_depth(e) + 1;
    const VertexIndex sites = f.tree().ball_size(d);
    auto truncate = [&](Spin m) {
        std::vector<Spin> range(m + 1);
        std::iota(range.begin(), range.end(), Spin{0});
        std::vector<Rectangle::Entry> entries;
        for (VertexIndex v = 0; v < sites; ++v) entries.emplace_back(v, SiteConstraint::in(range));
        return f.intersect(e, f.from_rectangle(f.make_rectangle(std::move(entries))));
    };
    auto gap_of = [&](const CylinderSet& k) { return Rational(total.finite() - h.mu_at(k, d).finite()); };

    constexpr Spin cap = Spin{1} << 20;
    // Invariant: gap(lo) >= eps > gap(hi).
    Spin lo = 0, hi = 0;
    if (gap_of(truncate(0)) >= eps) {
        hi = 1;
        while (gap_of(truncate(hi)) >= eps) {
            if (hi >= cap) throw std::runtime_error("no certified truncation below 2^20 values per site");
            lo = hi;
            hi *= 2;
        }
        while (hi - lo > 1) {
            const Spin mid = lo + (hi - lo) / 2;
            (gap_of(truncate(mid)) < eps ? hi : lo) = mid;
        }
    }
    CylinderSet k = truncate(hi);
    Rational gap = gap_of(k);
    return {std::move(k), std::move(gap), hi};
}

UniquenessReport uniqueness_crosscheck(const ExtensionHandle& h1, const ExtensionHandle& h2, unsigned trials,
                                       std::uint64_t seed, RandomCylinderOptions options) {
    options.max_depth = std::min({options.max_depth, h1.max_depth(), h2.max_depth()});
    SplitMix64 rng(seed);
    UniquenessReport report;
    for (unsigned t = 0; t < trials; ++t) {
        const CylinderSet e = random_cylinder(h1.field(), rng, options);
        const Extended a = h1.mu(e);
        const Extended b = h2.mu(e);
        ++report.trials;
        if (a == b) {
            ++report.agreed;
            continue;
        }
        if (!report.witness) {
            report.witness = e;
            report.first = a;
            report.second = b;
            if (a.is_finite() && b.is_finite() && !a.is_zero()) report.ratio = b.finite() / a.finite();
        }
    }
    return report;
}

} // namespace cayley
