#pragma once

#include "cayley/cylinder.hpp"
#include "cayley/rational.hpp"

#include <optional>
#include <vector>

namespace cayley {

/// Closed-form continuation of a weight sequence past its explicit prefix.
struct Tail {
    enum class Kind { Zero, Constant, Geometric };

    Kind kind = Kind::Zero;
    Rational coefficient{0};
    Rational ratio{0};  // Geometric only, 0 <= ratio < 1

    static Tail zero() { return {}; }
    static Tail constant(Rational c);
    static Tail geometric(Rational coefficient, Rational ratio);

    friend bool operator==(const Tail&, const Tail&) = default;
};

/// Non-negative weights w(0), w(1), ... given by an explicit prefix and a
/// closed-form tail: w(L + t) = c for Constant, c * r^t for Geometric.
/// For a finite alphabet of size s the prefix has exactly s entries.
class WeightSequence {
public:
    WeightSequence() = default;
    explicit WeightSequence(std::vector<Rational> prefix, Tail tail = Tail::zero());

    const std::vector<Rational>& prefix() const { return prefix_; }
    const Tail& tail() const { return tail_; }

    Rational at(Spin q) const;
    Extended total() const { return sum_from(0); }
    /// sum_{q >= start} w(q)
    Extended sum_from(Spin start) const;

    friend bool operator==(const WeightSequence&, const WeightSequence&) = default;

private:
    std::vector<Rational> prefix_;
    Tail tail_;
};

/// Function Phi -> [0, inf]: explicit prefix, constant afterwards.
class SpinFunction {
public:
    SpinFunction() = default;
    SpinFunction(std::vector<Extended> prefix, Extended tail) : prefix_(std::move(prefix)), tail_(std::move(tail)) {}
    static SpinFunction constant(Extended value) { return SpinFunction({}, std::move(value)); }

    const std::vector<Extended>& prefix() const { return prefix_; }
    const Extended& tail() const { return tail_; }
    const Extended& at(Spin q) const { return q < prefix_.size() ? prefix_[q] : tail_; }

    SpinFunction& operator*=(const SpinFunction& o);
    SpinFunction pow(unsigned exponent) const;
    /// Drops trailing prefix entries equal to the tail.
    SpinFunction trimmed() const;

    friend bool operator==(const SpinFunction& a, const SpinFunction& b);

private:
    std::vector<Extended> prefix_;
    Extended tail_{1};
};

/// Transition weights P(q, r). Rows q < rows().size() are explicit; every
/// larger q uses the default row (required over the naturals).
class TransitionKernel {
public:
    TransitionKernel() = default;
    TransitionKernel(std::vector<WeightSequence> rows, std::optional<WeightSequence> default_row = std::nullopt)
        : rows_(std::move(rows)), default_row_(std::move(default_row)) {}

    const std::vector<WeightSequence>& rows() const { return rows_; }
    const std::optional<WeightSequence>& default_row() const { return default_row_; }
    const WeightSequence& row(Spin q) const;

    /// True when every row, including the default, sums to exactly 1.
    bool is_stochastic() const;

    friend bool operator==(const TransitionKernel&, const TransitionKernel&) = default;

private:
    std::vector<WeightSequence> rows_;
    std::optional<WeightSequence> default_row_;
};

/// sum_{b in c} w(b) g(b), exact with closed-form tails.
Extended weighted_sum(const WeightSequence& w, const SiteConstraint& c, const SpinFunction& g);

/// a -> sum_{b in c} P(a, b) g(b), as a SpinFunction of the parent value a.
SpinFunction propagate(const TransitionKernel& kernel, const SpinSet& spins, const SiteConstraint& c,
                       const SpinFunction& g);

/// Checks that w fits the alphabet: prefix length s for finite spins, a tail
/// for the naturals. Throws std::invalid_argument otherwise.
void validate_weights(const WeightSequence& w, const SpinSet& spins, const char* what);
void validate_kernel(const TransitionKernel& kernel, const SpinSet& spins);

} // namespace cayley
