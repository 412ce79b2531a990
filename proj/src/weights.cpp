#include "cayley/weights.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cayley {

Tail Tail::constant(Rational c) {
    if (sgn(c) < 0) throw std::invalid_argument("constant tail must be non-negative");
    return {Kind::Constant, std::move(c), 0};
}

Tail Tail::geometric(Rational coefficient, Rational ratio) {
    if (sgn(coefficient) < 0) throw std::invalid_argument("geometric tail coefficient must be non-negative");
    if (sgn(ratio) < 0 || ratio >= 1) throw std::invalid_argument("geometric tail ratio must lie in [0, 1)");
    return {Kind::Geometric, std::move(coefficient), std::move(ratio)};
}

WeightSequence::WeightSequence(std::vector<Rational> prefix, Tail tail) : prefix_(std::move(prefix)), tail_(std::move(tail)) {
    for (const Rational& w : prefix_)
        if (sgn(w) < 0) throw std::invalid_argument("weights must be non-negative");
}

Rational WeightSequence::at(Spin q) const {
    if (q < prefix_.size()) return prefix_[q];
    switch (tail_.kind) {
    case Tail::Kind::Zero: return 0;
    case Tail::Kind::Constant: return tail_.coefficient;
    case Tail::Kind::Geometric: return tail_.coefficient * pow(tail_.ratio, q - prefix_.size());
    }
    return 0;
}

Extended WeightSequence::sum_from(Spin start) const {
    Rational head = 0;
    for (Spin q = start; q < prefix_.size(); ++q) head += prefix_[q];
    const Spin offset = start > prefix_.size() ? start - prefix_.size() : 0;
    switch (tail_.kind) {
    case Tail::Kind::Zero: return head;
    case Tail::Kind::Constant:
        return sgn(tail_.coefficient) == 0 ? Extended(head) : Extended::infinity();
    case Tail::Kind::Geometric: {
        Rational rest = tail_.coefficient * pow(tail_.ratio, offset) / (Rational(1) - tail_.ratio);
        return Extended(head + rest);
    }
    }
    return head;
}

SpinFunction& SpinFunction::operator*=(const SpinFunction& o) {
    const std::size_t n = std::max(prefix_.size(), o.prefix_.size());
    std::vector<Extended> out(n);
    for (std::size_t q = 0; q < n; ++q) out[q] = at(q) * o.at(q);
    prefix_ = std::move(out);
    tail_ *= o.tail_;
    return *this;
}

SpinFunction SpinFunction::pow(unsigned exponent) const {
    SpinFunction out = SpinFunction::constant(1);
    for (unsigned i = 0; i < exponent; ++i) out *= *this;
    return out;
}

SpinFunction SpinFunction::trimmed() const {
    SpinFunction out = *this;
    while (!out.prefix_.empty() && out.prefix_.back() == out.tail_) out.prefix_.pop_back();
    return out;
}

bool operator==(const SpinFunction& a, const SpinFunction& b) {
    const SpinFunction x = a.trimmed();
    const SpinFunction y = b.trimmed();
    return x.prefix_ == y.prefix_ && x.tail_ == y.tail_;
}

const WeightSequence& TransitionKernel::row(Spin q) const {
    if (q < rows_.size()) return rows_[q];
    if (!default_row_) throw std::out_of_range("kernel has no row for spin " + std::to_string(q));
    return *default_row_;
}

bool TransitionKernel::is_stochastic() const {
    for (const auto& r : rows_)
        if (r.total() != Extended(1)) return false;
    return !default_row_ || default_row_->total() == Extended(1);
}

Extended weighted_sum(const WeightSequence& w, const SiteConstraint& c, const SpinFunction& g) {
    Extended total = 0;
    if (c.kind() == SiteConstraint::Kind::In) {
        for (Spin b : c.values()) total += Extended(w.at(b)) * g.at(b);
        return total;
    }
    Spin limit = std::max<Spin>(w.prefix().size(), g.prefix().size());
    if (!c.values().empty()) limit = std::max<Spin>(limit, c.values().back() + 1);
    for (Spin b = 0; b < limit; ++b)
        if (c.admits(b)) total += Extended(w.at(b)) * g.at(b);
    total += g.tail() * w.sum_from(limit);
    return total;
}

SpinFunction propagate(const TransitionKernel& kernel, const SpinSet& spins, const SiteConstraint& c,
                       const SpinFunction& g) {
    if (spins.is_finite()) {
        std::vector<Extended> out(spins.size());
        for (Spin a = 0; a < spins.size(); ++a) out[a] = weighted_sum(kernel.row(a), c, g);
        // Values past s are never read; repeating the last one keeps trimmed forms canonical.
        Extended tail = out.empty() ? Extended(0) : out.back();
        return SpinFunction(std::move(out), std::move(tail)).trimmed();
    }
    std::vector<Extended> out(kernel.rows().size());
    for (Spin a = 0; a < out.size(); ++a) out[a] = weighted_sum(kernel.rows()[a], c, g);
    return SpinFunction(std::move(out), weighted_sum(kernel.row(kernel.rows().size()), c, g));
}

void validate_weights(const WeightSequence& w, const SpinSet& spins, const char* what) {
    if (spins.is_finite()) {
        if (w.prefix().size() != spins.size())
            throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(spins.size()) +
                                        " entries, got " + std::to_string(w.prefix().size()));
        if (w.tail().kind != Tail::Kind::Zero && sgn(w.tail().coefficient) != 0)
            throw std::invalid_argument(std::string(what) + ": tail descriptor not allowed for finite spins");
    }
}

void validate_kernel(const TransitionKernel& kernel, const SpinSet& spins) {
    if (spins.is_finite()) {
        if (kernel.rows().size() != spins.size())
            throw std::invalid_argument("kernel: expected " + std::to_string(spins.size()) + " rows, got " +
                                        std::to_string(kernel.rows().size()));
        if (kernel.default_row()) throw std::invalid_argument("kernel: default row not allowed for finite spins");
    } else if (!kernel.default_row()) {
        throw std::invalid_argument("kernel: the naturals need a default row for all larger spins");
    }
    for (const auto& r : kernel.rows()) validate_weights(r, spins, "kernel row");
    if (kernel.default_row()) validate_weights(*kernel.default_row(), spins, "kernel default row");
}

} // namespace cayley
