#pragma once

// Reference semantics for parsed events, and a generator of random
// expressions over the ten sites of V_2 with binary spins.

#include "cayley/random.hpp"
#include "cayley/specdsl.hpp"

#include <algorithm>

namespace oracle {

using cayley::EventExpr;
using cayley::Spin;
using cayley::SplitMix64;

/// Truth value of the expression on one atom, read straight off the tree.
inline bool truth(const EventExpr& e, const std::vector<Spin>& values) {
    using K = EventExpr::Kind;
    auto listed = [&] { return std::binary_search(e.values.begin(), e.values.end(), values.at(e.vertex)); };
    switch (e.kind) {
    case K::All: return true;
    case K::None: return false;
    case K::Equals:
    case K::In: return listed();
    case K::NotIn: return !listed();
    case K::Not: return !truth(e.children[0], values);
    case K::And:
        return std::all_of(e.children.begin(), e.children.end(), [&](const EventExpr& c) { return truth(c, values); });
    case K::Or:
        return std::any_of(e.children.begin(), e.children.end(), [&](const EventExpr& c) { return truth(c, values); });
    }
    return false;
}

inline EventExpr random_expr(SplitMix64& rng, int budget) {
    using K = EventExpr::Kind;
    EventExpr e;
    const auto pick = rng.below(budget > 0 ? 8 : 5);
    if (pick < 4) {
        e.vertex = rng.below(10);
        if (pick == 0) {
            e.kind = K::Equals;
            e.values = {rng.below(2)};
        } else {
            e.kind = pick == 3 ? K::NotIn : K::In;
            for (Spin q = 0; q < 2; ++q)
                if (rng.coin()) e.values.push_back(q);
        }
        return e;
    }
    if (pick == 4) {
        e.kind = rng.below(4) == 0 ? K::None : K::All;
        return e;
    }
    if (pick == 5) {
        e.kind = K::Not;
        e.children.push_back(random_expr(rng, budget - 1));
        return e;
    }
    e.kind = pick == 6 ? K::And : K::Or;
    const auto n = 2 + rng.below(2);
    for (std::uint64_t i = 0; i < n; ++i) {
        EventExpr c = random_expr(rng, budget - 1);
        // n-ary lists never nest a same-kind child directly
        if (c.kind == e.kind) {
            EventExpr wrapped;
            wrapped.kind = K::Not;
            EventExpr inner;
            inner.kind = K::Not;
            inner.children.push_back(std::move(c));
            wrapped.children.push_back(std::move(inner));
            c = std::move(wrapped);
        }
        e.children.push_back(std::move(c));
    }
    return e;
}

}  // namespace oracle
