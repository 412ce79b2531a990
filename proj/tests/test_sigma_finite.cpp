#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

#include "cayley/sigma_finite.hpp"

#include <numeric>

using namespace cayley;
using fixture::q;

namespace {

ExtensionHandle counting_handle(const CylinderField& f) { return ExtensionHandle::trusted(fixture::counting_root_chain(f)); }

CylinderSet root_in(const CylinderField& f, std::vector<Spin> values) {
    return f.from_rectangle(f.make_rectangle({{0, SiteConstraint::in(std::move(values))}}));
}

/// sum_{r in R} 2^-(r+1) for the child constraint set R; truncated enumeration
/// over the first 64 values suffices for the finite sets used here.
Rational child_mass(const std::vector<Spin>& values) {
    Rational s = 0;
    for (Spin r : values) s += pow(q(1, 2), r + 1);
    return s;
}

}  // namespace

TEST_CASE("conditioning on a root value of the counting-root chain") {
    auto f = fixture::naturals_field();
    auto h = counting_handle(f);
    auto cond = conditional_family(h, f.single_site(0, 3));
    CHECK(cond.mass() == 1);
    auto fam = cond.family();
    for (Depth k = 0; k <= 2; ++k) CHECK(fam.at(k)->mass() == Extended(1));
    CHECK(cond.value(f.single_site(1, 0)) == q(1, 2));
    CHECK(cond.value_at(f.single_site(1, 0), 3) == q(1, 2));
    CHECK(cond.value(f.single_site(0, 4)) == 0);
    CHECK(check_consistency(fam, 2).passed());
    CHECK_THROWS_AS(conditional_family(h, f.single_site(1, 0)), std::invalid_argument);
}

TEST_CASE("conditioning on everything reproduces a probability family") {
    auto f = fixture::binary_field();
    auto h = ExtensionHandle::trusted(fixture::sticky_chain(f));
    auto cond = conditional_family(h, f.universe());
    auto fam = cond.family();
    CHECK(fam.kind() == FamilyKind::Probability);
    SplitMix64 rng(4);
    for (int t = 0; t < 20; ++t) {
        const CylinderSet e = random_cylinder(f, rng);
        CHECK(Extended(cond.value(e)) == h.mu(e));
    }
    auto zero = conditional_family(h, f.single_site(0, 0));
    CHECK(zero.value(f.from_configuration(Configuration::on_prefix({1, 0, 0, 0}))) == 0);
    CHECK(check_consistency(zero.family(), 2).passed());
}

TEST_CASE("restriction identity") {
    auto f = fixture::naturals_field();
    auto h = counting_handle(f);
    auto cond = conditional_family(h, f.single_site(0, 3));
    auto r = restriction_identity_check(cond, root_in(f, {2, 3}), f.single_site(1, 0));
    CHECK(r.holds());
    CHECK(r.conditioned == q(1, 2));
    CHECK(child_mass({0}) == q(1, 2));
    CHECK(restriction_identity_check(cond, f.single_site(0, 3), f.single_site(2, 5)).holds());
    CHECK_THROWS_AS(restriction_identity_check(cond, f.single_site(0, 2), f.universe()), std::invalid_argument);

    auto g = fixture::binary_field();
    auto hg = ExtensionHandle::verified(random_consistent_family(g, 17, 2), 2);
    SplitMix64 rng(8);
    RandomCylinderOptions opt;
    opt.max_depth = 1;
    for (int t = 0; t < 50; ++t) {
        const CylinderSet a = random_cylinder(g, rng, opt);
        const CylinderSet wider = g.unite(a, random_cylinder(g, rng, opt));
        const CylinderSet e = random_cylinder(g, rng, opt);
        auto rr = restriction_identity_check(conditional_family(hg, a), wider, e);
        CHECK(rr.holds());
    }
}

TEST_CASE("cover sums over root slices") {
    auto f = fixture::naturals_field();
    auto h = counting_handle(f);
    auto sigma = sigma_extension(h, Cover::root_slices(f));
    auto single = sigma.evaluate(f.single_site(0, 3));
    CHECK(single.status == SumStatus::Exact);
    CHECK(single.value == 1);
    CHECK(single.terms == 4);

    auto diverging = sigma.evaluate(f.single_site(1, 0));
    CHECK(diverging.status == SumStatus::DivergesBeyond);
    CHECK(diverging.terms == 2001);
    CHECK(diverging.value == q(2001, 2));
    for (std::size_t i = 1; i < diverging.trace.size(); ++i) CHECK(diverging.trace[i] - diverging.trace[i - 1] == q(1, 2));

    SigmaOptions tight;
    tight.term_budget = 100;
    CHECK(sigma.evaluate(f.single_site(1, 0), tight).status == SumStatus::Inconclusive);
}

TEST_CASE("geometric tail policy converges") {
    auto f = fixture::naturals_field();
    auto h = counting_handle(f);
    // Parts {x0=0 & x1=i}: mu(E ∩ A_i) <= 2^-(i+1).
    auto cover = Cover::generated(
        "child-slices", [&](std::uint64_t i) { return f.intersect(f.single_site(0, 0), f.single_site(1, i)); },
        TailPolicy::GeometricBound, {}, GeometricBound{q(1, 2), q(1, 2)});
    auto r = sigma_extension(h, cover).evaluate(f.single_site(0, 0));
    CHECK(r.status == SumStatus::Converged);
    CHECK(r.tail_bound < SigmaOptions{}.tolerance);
    CHECK(Rational(1) - r.value <= r.tail_bound);
}

TEST_CASE("cover independence") {
    auto f = fixture::naturals_field();
    auto h = counting_handle(f);
    const CylinderSet e = f.intersect(root_in(f, {0, 1, 2}), f.single_site(1, 0));
    auto r = cover_independence(h, Cover::root_slices(f), Cover::root_blocks(f, 2), e);
    CHECK(r.exact);
    CHECK(r.agree);
    CHECK(r.first.value == q(3, 2));
    CHECK(r.second.value == q(3, 2));

    auto g = fixture::binary_field();
    auto hg = ExtensionHandle::trusted(fixture::sticky_chain(g));
    SplitMix64 rng(12);
    for (int t = 0; t < 50; ++t) {
        const CylinderSet ev = random_cylinder(g, rng);
        auto c = cover_independence(hg, Cover::root_slices(g), Cover::whole(g), ev);
        CHECK(c.agree);
        CHECK(Extended(c.first.value) == hg.mu(ev));
    }
}

TEST_CASE("condition (2.7) checks") {
    auto f = fixture::naturals_field();
    auto h = counting_handle(f);
    std::vector<Spin> ten(10);
    std::iota(ten.begin(), ten.end(), Spin{0});
    auto r = condition_2_7_check(h, Cover::root_slices(f), root_in(f, ten));
    CHECK(r.verdict == Verdict::Pass);
    CHECK(r.direct == Extended(10));
    CHECK(r.cover_sum.terms == 10);
    CHECK(r.cover_sum.tail_bound == 0);

    const CylinderSet e = f.intersect(f.single_site(0, 5), f.from_rectangle(f.make_rectangle({{1, SiteConstraint::in({0, 1})}})));
    auto r2 = condition_2_7_check(h, Cover::root_slices(f), e);
    CHECK(r2.verdict == Verdict::Pass);
    CHECK(r2.direct == Extended(child_mass({0, 1})));

    auto r3 = condition_2_7_check(h, Cover::root_slices(f), f.single_site(1, 0));
    CHECK(r3.verdict == Verdict::Inconclusive);

    auto g = fixture::binary_field();
    auto hg = ExtensionHandle::trusted(fixture::sticky_chain(g));
    SplitMix64 rng(2);
    for (int t = 0; t < 10; ++t)
        CHECK(condition_2_7_check(hg, Cover::atoms(g, 1), random_cylinder(g, rng)).verdict == Verdict::Pass);
}

TEST_CASE("lifted covers") {
    auto f = fixture::naturals_field();
    auto h = counting_handle(f);
    auto lifted = theorem_4_3_cover(h, 0, Cover::root_slices(f));
    for (const auto& m : lifted.masses) CHECK(m == Extended(1));
    CHECK(lifted.verified());
    // {x0=0} and its complement: the second has infinite mass.
    auto halves = Cover::finite("halves", {f.single_site(0, 0), f.complement(f.single_site(0, 0))});
    CHECK_THROWS_AS(theorem_4_3_cover(h, 0, halves), std::invalid_argument);

    auto g = fixture::binary_field();
    auto hg = ExtensionHandle::trusted(fixture::sticky_chain(g));
    auto atoms = theorem_4_3_cover(hg, 1, Cover::atoms(g, 1));
    CHECK(atoms.cover.size() == 16);
    Extended total = 0;
    for (const auto& m : atoms.masses) total += m;
    CHECK(total == hg.mu(g.universe()));
    CHECK(atoms.verified());
}

TEST_CASE("normalized extension") {
    auto f = fixture::binary_field();
    auto base = fixture::sticky_chain(f);
    auto plain = ExtensionHandle::trusted(base);
    auto scaled = scale(base, q(7, 3));
    auto norm = normalized_extension(scaled, 3);
    SplitMix64 rng(21);
    for (int t = 0; t < 100; ++t) {
        const CylinderSet e = random_cylinder(f, rng);
        CHECK(norm.mu(e) == Extended(q(7, 3)) * plain.mu(e));
    }
    CHECK(uniqueness_crosscheck(normalized_extension(base, 2), plain, 30, 1).passed());

    auto zero = product_family(f, WeightSequence({q(0), q(0)}));
    auto z = normalized_extension(zero, 2);
    CHECK(z.mu(f.universe()) == Extended(0));
    CHECK(z.mu(f.single_site(3, 1)) == Extended(0));

    auto broken = markov_family(f, WeightSequence({q(1, 2), q(1, 2)}),
                                TransitionKernel({WeightSequence({q(2, 3), q(1, 2)}), WeightSequence({q(1, 3), q(2, 3)})}));
    CHECK_THROWS_AS(normalized_extension(broken, 2), std::invalid_argument);
}

TEST_CASE("root exhaustion certifies a finite remainder") {
    auto f = fixture::naturals_field();
    // product of geometric weights 2^-(q+1): mu({x1=0} ∩ {x0 >= m}) = 2^-m / 2
    auto h = ExtensionHandle::trusted(product_family(f, WeightSequence({}, Tail::geometric(q(1, 2), q(1, 2)))));
    SigmaOptions opt;
    opt.tolerance = q(1, 1000);
    auto r = sigma_extension(h, Cover::root_slices(f)).evaluate(f.single_site(1, 0), opt);
    CHECK(r.status == SumStatus::Converged);
    CHECK(r.terms == 9);
    CHECK(r.tail_bound == pow(q(1, 2), 10));
    CHECK(r.value + r.tail_bound == q(1, 2));
    auto c = condition_2_7_check(h, Cover::root_slices(f), f.single_site(1, 0), opt);
    CHECK(c.verdict == Verdict::Pass);
}

TEST_CASE("partial sums never decrease") {
    auto f = fixture::naturals_field();
    auto h = counting_handle(f);
    const CylinderSet e = f.unite(f.intersect(root_in(f, {1, 4, 7}), f.single_site(2, 1)), f.single_site(0, 9));
    auto r = sigma_extension(h, Cover::root_blocks(f, 3)).evaluate(e);
    REQUIRE(r.status == SumStatus::Exact);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i - 1] <= r.trace[i]);
    CHECK(Extended(r.value) == h.mu(e));
}

TEST_CASE("conditional values agree at two evaluation depths") {
    auto f = fixture::naturals_field();
    auto h = counting_handle(f);
    const ConditionalExtension cond(h, root_in(f, {2, 3}));
    SplitMix64 rng(4);
    RandomCylinderOptions opt;
    opt.max_depth = 1;
    for (int t = 0; t < 30; ++t) {
        const CylinderSet e = random_cylinder(f, rng, opt);
        CHECK(cond.value_at(e, 1) == cond.value_at(e, 3));
    }
}

TEST_CASE("sigma-finite pathways reduce to the plain extension on probability families") {
    auto f = fixture::binary_field();
    auto h = ExtensionHandle::trusted(fixture::sticky_chain(f));
    auto lifted = theorem_4_3_cover(h, 1, Cover::atoms(f, 1));
    SplitMix64 rng(40);
    for (int t = 0; t < 30; ++t) {
        const CylinderSet e = random_cylinder(f, rng);
        const Extended plain = h.mu(e);
        for (const Cover& c : {Cover::whole(f), Cover::atoms(f, 2), lifted.cover}) {
            auto r = sigma_extension(h, c).evaluate(e);
            CHECK(r.status == SumStatus::Exact);
            CHECK(Extended(r.value) == plain);
        }
        CHECK(Extended(oracle::chain_measure(2, 2, {q(1, 2), q(1, 2)}, {{q(2, 3), q(1, 3)}, {q(1, 3), q(2, 3)}}, e)) ==
              plain);
    }
}
