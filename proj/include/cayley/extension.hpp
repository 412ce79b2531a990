#pragma once

#include "cayley/measure.hpp"
#include "cayley/random.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cayley {

class ConsistencyError : public std::runtime_error {
public:
    ConsistencyError(const std::string& what, ConsistencyReport report)
        : std::runtime_error(what), report_(std::move(report)) {}
    const ConsistencyReport& report() const { return report_; }

private:
    ConsistencyReport report_;
};

/// The set function mu on the cylinder field: mu(E) = factor * mu_n(E) with
/// n the base depth of E. Values are cached by canonical text.
class ExtensionHandle {
public:
    /// Runs check_consistency to `depth`; throws ConsistencyError on failure.
    static ExtensionHandle verified(MeasureFamily family, Depth depth);
    /// No audit. Only for families whose closed form guarantees consistency.
    static ExtensionHandle trusted(MeasureFamily family);
    /// trusted() when the closed form allows it, otherwise verified(depth).
    static ExtensionHandle make(MeasureFamily family, Depth depth);

    const MeasureFamily& family() const { return family_; }
    const CylinderField& field() const { return family_.field(); }
    bool is_trusted() const { return trusted_; }
    Depth verified_depth() const { return verified_depth_; }
    /// Deepest level at which the handle may evaluate.
    Depth max_depth() const;
    const Extended& factor() const { return factor_; }

    /// The same handle with every value multiplied by c.
    ExtensionHandle scaled(const Extended& c) const;

    Extended mu(const CylinderSet& e) const;
    /// mu_n(E) for an explicit n >= base_depth(E).
    Extended mu_at(const CylinderSet& e, Depth n) const;

private:
    struct Cache;

    ExtensionHandle(MeasureFamily family, bool trusted, Depth verified_depth);
    void check_depth(Depth n) const;

    MeasureFamily family_;
    bool trusted_;
    Depth verified_depth_;
    Extended factor_{1};
    std::shared_ptr<Cache> cache_;
};

struct AdditivityReport {
    Extended union_value;
    Extended parts_sum;
    std::vector<Extended> part_values;
    bool holds() const { return union_value == parts_sum; }
};

/// Throws std::invalid_argument unless the parts are certified pairwise disjoint.
AdditivityReport additivity_check(const ExtensionHandle& h, const std::vector<CylinderSet>& parts);

enum class ContinuityVerdict {
    CertifiedEmpty,         // some seq(n) is empty as a constraint system
    DecayedBelowThreshold,  // last value under the threshold; emptiness not claimed
    Decreasing,             // strictly decreasing, above the threshold
    Stationary,             // no decrease between the last two depths
};

std::string to_string(ContinuityVerdict v);

struct ContinuityReport {
    std::vector<std::pair<Depth, Extended>> values;
    ContinuityVerdict verdict = ContinuityVerdict::Stationary;
    std::optional<Depth> empty_from;
    bool non_increasing = true;
};

/// Evaluates mu(seq(n)) for n = 0..max_n after checking seq(n+1) ⊆ seq(n).
ContinuityReport continuity_probe(const ExtensionHandle& h, const std::function<CylinderSet(Depth)>& seq,
                                  Depth max_n, const Rational& threshold = 0);

struct InnerApprox {
    CylinderSet compact;
    Rational gap;         // mu(E) - mu(K), exact
    std::optional<Spin> bound;  // largest admitted spin, naturals only
};

/// K ⊆ E using In constraints only. Over the naturals every site of
/// V_{base+1} is capped at the smallest M with gap < eps.
InnerApprox inner_compact_approx(const ExtensionHandle& h, const CylinderSet& e, const Rational& eps);

struct UniquenessReport {
    unsigned trials = 0;
    unsigned agreed = 0;
    std::optional<CylinderSet> witness;
    Extended first;
    Extended second;
    std::optional<Rational> ratio;  // second / first at the witness when both are finite
    bool passed() const { return !witness; }
};

/// Compares two handles on `trials` seeded random cylinders.
UniquenessReport uniqueness_crosscheck(const ExtensionHandle& h1, const ExtensionHandle& h2, unsigned trials,
                                       std::uint64_t seed, RandomCylinderOptions options = {});

} // namespace cayley
