#include "cayley/random.hpp"

namespace cayley {

namespace {

SiteConstraint random_constraint(const CylinderField& field, SplitMix64& rng, const RandomCylinderOptions& opt) {
    const bool finite = field.spins().is_finite();
    const Spin range = finite ? field.spins().size() : opt.spin_range;
    std::vector<Spin> values;
    const std::uint64_t count = 1 + rng.below(finite ? range : 3);
    for (std::uint64_t i = 0; i < count; ++i) values.push_back(rng.below(range));
    if (!finite && rng.below(4) == 0) return SiteConstraint::not_in(std::move(values));
    return SiteConstraint::in(std::move(values));
}

} // namespace

Rectangle random_rectangle(const CylinderField& field, SplitMix64& rng, const RandomCylinderOptions& opt) {
    const Depth depth = static_cast<Depth>(rng.below(opt.max_depth + 1));
    const VertexIndex sites = field.tree().ball_size(depth);
    std::vector<Rectangle::Entry> entries;
    const std::uint64_t count = rng.below(opt.max_constraints + 1);
    for (std::uint64_t i = 0; i < count; ++i)
        entries.emplace_back(rng.below(sites), random_constraint(field, rng, opt));
    return field.make_rectangle(std::move(entries));
}

CylinderSet random_cylinder(const CylinderField& field, SplitMix64& rng, const RandomCylinderOptions& opt) {
    std::vector<Rectangle> rs;
    const std::uint64_t count = 1 + rng.below(opt.max_rectangles);
    for (std::uint64_t i = 0; i < count; ++i) rs.push_back(random_rectangle(field, rng, opt));
    return field.from_rectangles(std::move(rs));
}

} // namespace cayley
