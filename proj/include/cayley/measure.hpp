#pragma once

#include "cayley/cylinder.hpp"
#include "cayley/rational.hpp"
#include "cayley/weights.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace cayley {

class VolumeMeasure;

/// Weights of every atom of Phi^{V_n}: unit * counts[index], where
/// index = sum_i sigma(x_i) s^i.
struct DenseTable {
    Rational unit{1};
    std::vector<std::int64_t> counts;

    friend bool operator==(const DenseTable&, const DenseTable&) = default;
};

/// lambda(sigma(x0)) * prod_{edges} P(parent, child) * prod_{v in W_n} h(sigma(v)).
/// The boundary h is identically 1 for a plain chain; projections of
/// chains with non-stochastic rows fold the summed-out levels into it.
struct MarkovForm {
    WeightSequence root;
    TransitionKernel kernel;
    SpinFunction boundary = SpinFunction::constant(1);

    friend bool operator==(const MarkovForm&, const MarkovForm&) = default;
};

/// prod_{v in V_n} w(sigma(v)).
struct ProductForm {
    WeightSequence weights;

    friend bool operator==(const ProductForm&, const ProductForm&) = default;
};

/// E -> base(E ∩ restriction), with base at depth >= this depth.
struct RestrictedForm {
    std::shared_ptr<const VolumeMeasure> base;
    CylinderSet restriction;
};

/// A non-negative measure on Phi^{V_n}, times an extended scale factor.
class VolumeMeasure {
public:
    using Form = std::variant<DenseTable, MarkovForm, ProductForm, RestrictedForm>;

    VolumeMeasure(CylinderField field, Depth depth, Form form, Extended scale = 1);

    const CylinderField& field() const { return field_; }
    Depth depth() const { return depth_; }
    const Form& form() const { return form_; }
    const Extended& scale() const { return scale_; }

    /// mu_n(B) for a cylinder whose constrained sites lie in V_n.
    Extended measure_of_base(const CylinderSet& base) const;
    Extended mass() const { return measure_of_base(field_.universe()); }
    /// Weight of one atom of Phi^{V_n} (values of x_0..x_{|V_n|-1}).
    Extended atom_weight(std::span<const Spin> values) const;

    VolumeMeasure scaled(const Extended& c) const;

    /// Same depth, scale and form parameters. Sufficient for equality, not necessary.
    bool structurally_equal(const VolumeMeasure& other) const;

private:
    Extended rectangle_mass(const Rectangle& r) const;

    CylinderField field_;
    Depth depth_;
    Form form_;
    Extended scale_;
};

/// The chain form of a product measure: lambda = w and every row equal to w.
MarkovForm as_markov(const ProductForm& p, const SpinSet& spins);

/// Marginal on V_i: [project(mu, i)](B) = mu{sigma : sigma|_{V_i} in B}.
/// Chains project in closed form; tables are summed.
VolumeMeasure project(const VolumeMeasure& mu, Depth i);

/// Dense table of a finite-spin measure. Throws EnumerationBudgetError over
/// the atom budget and std::overflow_error if the integer counts overflow.
VolumeMeasure materialize(const VolumeMeasure& mu);

enum class FamilyKind { Probability, Finite, SigmaFiniteCandidate };

std::string to_string(FamilyKind kind);

/// depth -> mu_n, with memoized deterministic generation.
class MeasureFamily {
public:
    using Generator = std::function<VolumeMeasure(Depth)>;

    MeasureFamily(CylinderField field, Generator generator, FamilyKind kind, std::string description);

    const CylinderField& field() const { return field_; }
    FamilyKind kind() const { return kind_; }
    const std::string& description() const { return description_; }

    /// Throws DepthLimitError past max_depth().
    std::shared_ptr<const VolumeMeasure> at(Depth n) const;
    Depth max_depth() const { return max_depth_; }

    /// Consistency follows from the closed form (e.g. stochastic rows).
    bool closed_form_consistent() const { return closed_form_consistent_; }
    std::optional<Depth> declared_consistent_to() const { return declared_consistent_to_; }

    MeasureFamily& set_max_depth(Depth d);
    MeasureFamily& set_closed_form_consistent(bool v) { closed_form_consistent_ = v; return *this; }
    MeasureFamily& set_declared_consistent_to(std::optional<Depth> d) { declared_consistent_to_ = d; return *this; }

private:
    struct Cache;

    CylinderField field_;
    Generator generator_;
    FamilyKind kind_;
    std::string description_;
    Depth max_depth_;
    bool closed_form_consistent_ = false;
    std::optional<Depth> declared_consistent_to_;
    std::shared_ptr<Cache> cache_;
};

MeasureFamily markov_family(const CylinderField& field, WeightSequence root, TransitionKernel kernel);
MeasureFamily product_family(const CylinderField& field, WeightSequence weights);
/// Every measure multiplied by c > 0.
MeasureFamily scale(const MeasureFamily& family, const Rational& c);
/// Projections of a fixed table at depth N; depths above N are unavailable.
MeasureFamily table_family(const VolumeMeasure& table);
/// Random probability table on Phi^{V_N}, deterministic in the seed.
MeasureFamily random_consistent_family(const CylinderField& field, std::uint64_t seed, Depth depth);

struct ConsistencyViolation {
    Depth coarse = 0;  // i
    Depth fine = 0;    // j
    CylinderSet witness;
    Extended projected;  // project(mu_j, i)(witness)
    Extended direct;     // mu_i(witness)
};

struct ConsistencyReport {
    Depth requested = 0;
    /// Largest D' <= requested with project(mu_j, i) = mu_i for all i < j <= D'.
    Depth consistent_to = 0;
    std::optional<ConsistencyViolation> violation;
    /// False when some pair was only compared on probe cylinders.
    bool exact = true;
    bool budget_exceeded = false;

    bool passed() const { return !violation && !budget_exceeded && consistent_to == requested; }
};

/// Verifies project(mu_j, i) = mu_i for all i < j <= depth: atom by atom for
/// finite spins within the atom budget, otherwise by closed-form parameter
/// comparison and, failing that, by a witness search over probe cylinders.
ConsistencyReport check_consistency(const MeasureFamily& family, Depth depth);

} // namespace cayley
