#pragma once

#include "cayley/extension.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cayley {

/// How the remainder of an infinite cover sum is certified.
enum class TailPolicy {
    FiniteList,      // nothing beyond the listed parts
    RootExhaustion,  // part i only meets {x0 >= min_root(i)}
    GeometricBound,  // mu(E ∩ A_i) <= c r^i
    None,
};

std::string to_string(TailPolicy p);

struct GeometricBound {
    Rational coefficient;
    Rational ratio;  // in [0, 1)
};

/// Pairwise disjoint cylinders A_0, A_1, ... whose union is Omega.
class Cover {
public:
    using Generator = std::function<CylinderSet(std::uint64_t)>;

    static Cover finite(std::string name, std::vector<CylinderSet> parts);
    static Cover generated(std::string name, Generator parts, TailPolicy policy,
                           std::function<Spin(std::uint64_t)> min_root = {},
                           std::optional<GeometricBound> bound = std::nullopt);

    /// {x0 = q}; a finite list for finite spins.
    static Cover root_slices(const CylinderField& f);
    /// {x0 in {b q, ..., b q + b - 1}}.
    static Cover root_blocks(const CylinderField& f, Spin block);
    /// Atoms of Phi^{V_n}; finite spins only.
    static Cover atoms(const CylinderField& f, Depth n);
    static Cover whole(const CylinderField& f);

    const std::string& name() const { return name_; }
    bool is_finite() const { return policy_ == TailPolicy::FiniteList; }
    /// Number of parts of a finite cover.
    std::size_t size() const { return parts_.size(); }
    CylinderSet part(std::uint64_t i) const;
    TailPolicy policy() const { return policy_; }
    /// RootExhaustion: every part j >= i forces x0 >= min_root(i).
    Spin min_root(std::uint64_t i) const { return min_root_(i); }
    const std::optional<GeometricBound>& bound() const { return bound_; }

private:
    Cover() = default;

    std::string name_;
    std::vector<CylinderSet> parts_;
    Generator generator_;
    TailPolicy policy_ = TailPolicy::FiniteList;
    std::function<Spin(std::uint64_t)> min_root_;
    std::optional<GeometricBound> bound_;
};

/// The finite family mu_k^{(A)}(E_k) = mu_m(E_k ∩ A), m = max(n_A, k).
class ConditionalExtension {
public:
    /// Throws std::invalid_argument when mu(A) is infinite.
    ConditionalExtension(ExtensionHandle handle, CylinderSet a);

    const ExtensionHandle& handle() const { return handle_; }
    const CylinderSet& conditioning() const { return a_; }
    const Rational& mass() const { return mass_; }

    Rational value(const CylinderSet& e) const;
    /// Same quantity evaluated at an explicit depth m >= max(n_A, n_E).
    Rational value_at(const CylinderSet& e, Depth m) const;
    /// depth k -> mu_k^{(A)}, as restricted measures.
    MeasureFamily family() const;

private:
    ExtensionHandle handle_;
    CylinderSet a_;
    Depth a_depth_;
    Rational mass_;
};

ConditionalExtension conditional_family(const ExtensionHandle& h, const CylinderSet& a);

struct RestrictionReport {
    Rational conditioned;   // mu^{(A)}(E)
    Rational widened;       // mu^{(A')}(E ∩ A)
    Extended direct;        // mu(E ∩ A)
    bool holds() const { return conditioned == widened && Extended(conditioned) == direct; }
};

/// Requires A ⊆ A' (certified) with mu(A') finite.
RestrictionReport restriction_identity_check(const ConditionalExtension& cond, const CylinderSet& wider,
                                             const CylinderSet& e);

struct SigmaOptions {
    Rational tolerance{1, 1ul << 40};
    std::uint64_t term_budget = 1'000'000;
    Rational divergence_bound{1000};
    std::size_t trace_limit = 10'000;
};

enum class SumStatus {
    Exact,           // tail certified zero
    Converged,       // certified tail below tolerance
    DivergesBeyond,  // partial sum exceeds the divergence bound
    Inconclusive,    // term budget spent
};

std::string to_string(SumStatus s);

struct SigmaResult {
    SumStatus status = SumStatus::Inconclusive;
    Rational value{0};       // partial sum over `terms` parts
    Rational tail_bound{0};  // valid for Exact and Converged
    std::uint64_t terms = 0;
    std::vector<Rational> trace;  // partial sums, capped at trace_limit
};

/// mu^{(Omega)}(E) = sum_i mu^{(A_i)}(E), summed in cover order.
class SigmaFiniteExtension {
public:
    SigmaFiniteExtension(ExtensionHandle handle, Cover cover);

    const ExtensionHandle& handle() const { return handle_; }
    const Cover& cover() const { return cover_; }

    /// mu(E ∩ A_i); throws when mu(A_i) is infinite.
    Rational term(const CylinderSet& e, std::uint64_t i) const;
    SigmaResult evaluate(const CylinderSet& e, const SigmaOptions& options = {}) const;

private:
    ExtensionHandle handle_;
    Cover cover_;
};

SigmaFiniteExtension sigma_extension(const ExtensionHandle& h, const Cover& cover);

struct CoverComparison {
    SigmaResult first;
    SigmaResult second;
    bool agree = false;
    bool exact = false;  // both sums exact
};

/// Agreement exactly, or within the sum of both certified tails.
CoverComparison cover_independence(const ExtensionHandle& h, const Cover& c1, const Cover& c2, const CylinderSet& e,
                                   const SigmaOptions& options = {});

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);

struct Condition27Report {
    Extended direct;
    SigmaResult cover_sum;
    Verdict verdict = Verdict::Inconclusive;
};

/// mu(E) against sum_i mu(E ∩ A_i). A Fail is a genuine counterexample.
Condition27Report condition_2_7_check(const ExtensionHandle& h, const Cover& cover, const CylinderSet& e,
                                      const SigmaOptions& options = {});

struct LiftedCover {
    Cover cover;
    std::vector<Extended> masses;  // checked slices
    std::vector<std::pair<CylinderSet, Condition27Report>> probes;
    bool verified() const;
};

/// Lifts a finite-mass partition of Phi^{V_{n0}} to a cover of Omega and
/// re-checks the cover identity on probe cylinders. Generated slices are
/// checked on their first `checked_parts` parts.
LiftedCover theorem_4_3_cover(const ExtensionHandle& h, Depth n0, const Cover& slices,
                              const SigmaOptions& options = {}, std::uint64_t checked_parts = 16);

/// c * (extension of mu_n / c), with c = mu_n(Omega) checked constant for
/// n <= depth. c = 0 yields the zero measure.
ExtensionHandle normalized_extension(const MeasureFamily& family, Depth depth);

} // namespace cayley
