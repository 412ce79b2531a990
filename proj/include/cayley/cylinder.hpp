#pragma once

#include "cayley/rational.hpp"
#include "cayley/tree.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cayley {

using Spin = std::uint64_t;

/// Spin alphabet: {0,...,s-1} or the naturals {0,1,2,...}.
class SpinSet {
public:
    static SpinSet finite(Spin size);
    static SpinSet naturals() { return SpinSet(0, false); }

    bool is_finite() const { return finite_; }
    /// Alphabet size; only meaningful for finite alphabets.
    Spin size() const;
    bool contains(Spin q) const { return !finite_ || q < size_; }

    friend bool operator==(const SpinSet&, const SpinSet&) = default;

private:
    SpinSet(Spin size, bool finite) : size_(size), finite_(finite) {}
    Spin size_;
    bool finite_;
};

/// Tree plus spin alphabet: the configuration space Omega = Phi^V.
struct Space {
    TreeGeometry tree;
    SpinSet spins;

    friend bool operator==(const Space&, const Space&) = default;
};

/// A function from a finite vertex set A to spins.
class Configuration {
public:
    Configuration() = default;
    /// Pairs are sorted by vertex; duplicate vertices are rejected.
    explicit Configuration(std::vector<std::pair<VertexIndex, Spin>> assignment);
    /// Configuration on the prefix {x_0, ..., x_{n-1}}, e.g. an atom of V_n.
    static Configuration on_prefix(std::vector<Spin> values);

    const std::vector<std::pair<VertexIndex, Spin>>& assignment() const { return assignment_; }
    std::optional<Spin> value(VertexIndex v) const;
    /// True when every vertex below `count` is assigned.
    bool covers_prefix(VertexIndex count) const;
    /// Values of x_0..x_{count-1}; requires covers_prefix(count).
    std::vector<Spin> prefix_values(VertexIndex count) const;

    friend bool operator==(const Configuration&, const Configuration&) = default;
    friend auto operator<=>(const Configuration&, const Configuration&) = default;

private:
    std::vector<std::pair<VertexIndex, Spin>> assignment_;
};

/// Per-site constraint. Finite alphabets never keep NotIn after normalization.
class SiteConstraint {
public:
    enum class Kind { Any, In, NotIn };

    static SiteConstraint any() { return SiteConstraint(Kind::Any, {}); }
    static SiteConstraint in(std::vector<Spin> values) { return SiteConstraint(Kind::In, std::move(values)); }
    static SiteConstraint not_in(std::vector<Spin> values) { return SiteConstraint(Kind::NotIn, std::move(values)); }

    Kind kind() const { return kind_; }
    /// Sorted, duplicate free.
    const std::vector<Spin>& values() const { return values_; }
    bool admits(Spin q) const;
    bool is_empty() const { return kind_ == Kind::In && values_.empty(); }

    friend bool operator==(const SiteConstraint&, const SiteConstraint&) = default;
    friend auto operator<=>(const SiteConstraint&, const SiteConstraint&) = default;

private:
    SiteConstraint(Kind kind, std::vector<Spin> values);
    Kind kind_;
    std::vector<Spin> values_;
};

/// Product of per-site constraints over finitely many sites.
///
/// Canonical form: entries sorted by vertex, no Any entries.
class Rectangle {
public:
    using Entry = std::pair<VertexIndex, SiteConstraint>;

    Rectangle() = default;  // Omega
    const std::vector<Entry>& entries() const { return entries_; }
    /// Any when the vertex is unconstrained.
    SiteConstraint at(VertexIndex v) const;
    bool is_empty() const;
    bool is_universe() const { return entries_.empty(); }
    /// Largest constrained vertex, if any.
    std::optional<VertexIndex> max_vertex() const;

    friend bool operator==(const Rectangle&, const Rectangle&) = default;
    friend auto operator<=>(const Rectangle&, const Rectangle&) = default;

private:
    friend class CylinderField;
    std::vector<Entry> entries_;
};

/// Finite union of rectangles: an element of the cylinder field.
class CylinderSet {
public:
    CylinderSet() = default;  // empty set
    const std::vector<Rectangle>& rectangles() const { return rectangles_; }
    bool is_empty() const { return rectangles_.empty(); }

    friend bool operator==(const CylinderSet&, const CylinderSet&) = default;

private:
    friend class CylinderField;
    std::vector<Rectangle> rectangles_;
};

class NormalizationBudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EnumerationBudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Decision { Yes, No, Undecided };

struct RhoResult {
    Rational partial;     // sum over the first |V_N| indices
    Rational tail_bound;  // bound on the remaining terms
};

/// Pair produced by generator_decomposition. `first` and `second` both
/// reference every site of V_n and intersect to exactly {x_m = q}.
struct GeneratorPair {
    Configuration omega;
    Configuration nu;
    CylinderSet first;
    CylinderSet second;
    bool degenerate = false;
};

/// Boolean algebra of cylinder sets over a fixed configuration space.
///
/// Every operation returns canonical results: empty rectangles removed,
/// duplicates and absorbed rectangles dropped, rectangles that differ at a
/// single site merged, and the list sorted. Canonical forms are not unique
/// semantically; use semantic_equal for set equality.
class CylinderField {
public:
    static constexpr std::size_t default_rectangle_budget = std::size_t{1} << 16;
    static constexpr std::uint64_t default_atom_budget = std::uint64_t{1} << 24;

    explicit CylinderField(Space space,
                           std::size_t rectangle_budget = default_rectangle_budget,
                           std::uint64_t atom_budget = default_atom_budget);

    const Space& space() const { return space_; }
    const TreeGeometry& tree() const { return space_.tree; }
    const SpinSet& spins() const { return space_.spins; }
    std::uint64_t atom_budget() const { return atom_budget_; }

    CylinderSet universe() const;
    CylinderSet empty() const { return {}; }
    /// {sigma : sigma(x_m) = q}
    CylinderSet single_site(VertexIndex m, Spin q) const;
    /// Normalizes the constraints; Any entries are dropped.
    Rectangle make_rectangle(std::vector<Rectangle::Entry> entries) const;
    CylinderSet from_rectangle(Rectangle r) const;
    CylinderSet from_rectangles(std::vector<Rectangle> rs) const;
    /// The cylinder {sigma : sigma|_A = sigma_A}.
    CylinderSet from_configuration(const Configuration& c) const;

    CylinderSet intersect(const CylinderSet& a, const CylinderSet& b) const;
    CylinderSet unite(const CylinderSet& a, const CylinderSet& b) const;
    CylinderSet complement(const CylinderSet& a) const;
    CylinderSet difference(const CylinderSet& a, const CylinderSet& b) const;

    Decision semantic_equal(const CylinderSet& a, const CylinderSet& b) const;
    Decision subset(const CylinderSet& a, const CylinderSet& b) const;
    Decision disjoint(const CylinderSet& a, const CylinderSet& b) const;

    /// Smallest n with every constrained site in V_n.
    Depth base_depth(const CylinderSet& c) const;
    Depth base_depth(const Rectangle& r) const;

    /// Pairwise disjoint rectangles with the same union as c.
    std::vector<Rectangle> disjoint_rectangles(const CylinderSet& c) const;

    /// Membership of a configuration that assigns every constrained site.
    bool contains(const CylinderSet& c, const Configuration& sigma) const;
    bool contains(const Rectangle& r, std::span<const Spin> prefix) const;

    /// Number of atoms of Phi^{V_n}; throws EnumerationBudgetError when over budget.
    std::uint64_t atom_count(Depth n) const;
    /// Atoms of Phi^{V_n} inside c, in little-endian index order.
    std::vector<Configuration> atoms(const CylinderSet& c, Depth n) const;
    /// Indicator over all atoms of Phi^{V_n}; index = sum_i sigma(x_i) s^i.
    std::vector<bool> atom_mask(const CylinderSet& c, Depth n) const;

    /// Canonical text: "x0=1 & x3 in {0,2} | x1 notin {4}", "all", "none".
    std::string render(const CylinderSet& c) const;
    std::string render(const Rectangle& r) const;

    /// Truncated metric sum_{n < |V_N|} 2^{-n} [a(x_n) != b(x_n)] with a bound
    /// on the remaining terms. When the configurations are declared equal
    /// beyond V_N the tail bound is zero and the value exact.
    RhoResult rho(const Configuration& a, const Configuration& b, Depth truncation,
                  bool equal_beyond = false) const;

    /// Writes {x_m = q} as the intersection of two cylinders whose
    /// defining configurations on V_n agree only at x_m.
    GeneratorPair generator_decomposition(VertexIndex m, Spin q, Depth n) const;

    SiteConstraint normalize(const SiteConstraint& c) const;
    SiteConstraint intersect(const SiteConstraint& a, const SiteConstraint& b) const;
    SiteConstraint unite(const SiteConstraint& a, const SiteConstraint& b) const;
    SiteConstraint complement(const SiteConstraint& c) const;
    bool subset(const SiteConstraint& a, const SiteConstraint& b) const;

    Rectangle intersect(const Rectangle& a, const Rectangle& b) const;
    /// Disjoint rectangles whose union is the complement of r.
    std::vector<Rectangle> complement(const Rectangle& r) const;
    bool subset(const Rectangle& a, const Rectangle& b) const;

private:
    void check_spin(Spin q) const;
    void check_vertex(VertexIndex v) const;
    CylinderSet canonical(std::vector<Rectangle> rs) const;
    std::vector<Rectangle> subtract(const Rectangle& r, const Rectangle& s) const;

    Space space_;
    std::size_t rectangle_budget_;
    std::uint64_t atom_budget_;
};

} // namespace cayley
