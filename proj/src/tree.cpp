#include "cayley/tree.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace cayley {

TreeGeometry::TreeGeometry(unsigned order, Depth max_depth) : order_(order), max_depth_(max_depth) {
    if (order < 1) throw std::invalid_argument("tree order must be at least 1");
    ball_.reserve(max_depth + 1);
    VertexIndex total = 1;
    VertexIndex sphere = 1;
    ball_.push_back(total);
    for (Depth n = 1; n <= max_depth; ++n) {
        const VertexIndex factor = n == 1 ? order + 1 : order;
        if (sphere > std::numeric_limits<VertexIndex>::max() / factor / 2)
            throw std::overflow_error("max_depth too large for 64-bit vertex indices");
        sphere *= factor;
        total += sphere;
        ball_.push_back(total);
    }
}

void TreeGeometry::require_depth(Depth n) const {
    if (n > max_depth_)
        throw DepthLimitError("depth " + std::to_string(n) + " exceeds max_depth " + std::to_string(max_depth_));
}

VertexIndex TreeGeometry::sphere_size(Depth n) const {
    require_depth(n);
    return n == 0 ? 1 : ball_[n] - ball_[n - 1];
}

VertexIndex TreeGeometry::ball_size(Depth n) const {
    require_depth(n);
    return ball_[n];
}

IndexRange TreeGeometry::sphere_vertices(Depth n) const {
    require_depth(n);
    return {n == 0 ? 0 : ball_[n - 1], ball_[n]};
}

Depth TreeGeometry::level(VertexIndex v) const {
    const auto it = std::upper_bound(ball_.begin(), ball_.end(), v);
    if (it == ball_.end())
        throw DepthLimitError("vertex " + std::to_string(v) + " lies beyond max_depth " + std::to_string(max_depth_));
    return static_cast<Depth>(it - ball_.begin());
}

VertexIndex TreeGeometry::position(VertexIndex v) const {
    const Depth n = level(v);
    return n == 0 ? 0 : v - ball_[n - 1];
}

VertexIndex TreeGeometry::vertex_at(Depth n, VertexIndex pos) const {
    const IndexRange sphere = sphere_vertices(n);
    if (pos >= sphere.size()) throw std::out_of_range("position outside sphere");
    return sphere.first + pos;
}

VertexIndex TreeGeometry::parent(VertexIndex v) const {
    if (v == 0) throw std::invalid_argument("the root has no parent");
    const Depth n = level(v);
    if (n == 1) return 0;
    return vertex_at(n - 1, position(v) / order_);
}

IndexRange TreeGeometry::children(VertexIndex v) const {
    const Depth n = level(v);
    require_depth(n + 1);
    if (n == 0) return {1, 1 + order_ + VertexIndex{1}};
    const VertexIndex first = ball_[n] + position(v) * order_;
    return {first, first + order_};
}

std::vector<VertexIndex> TreeGeometry::children_list(VertexIndex v) const {
    const IndexRange r = children(v);
    std::vector<VertexIndex> out;
    out.reserve(r.size());
    for (VertexIndex c = r.first; c < r.last; ++c) out.push_back(c);
    return out;
}

VertexIndex TreeGeometry::lowest_common_ancestor(VertexIndex u, VertexIndex v) const {
    Depth lu = level(u), lv = level(v);
    while (lu > lv) { u = parent(u); --lu; }
    while (lv > lu) { v = parent(v); --lv; }
    while (u != v) {
        u = parent(u);
        v = parent(v);
    }
    return u;
}

Depth TreeGeometry::distance(VertexIndex u, VertexIndex v) const {
    const VertexIndex a = lowest_common_ancestor(u, v);
    return level(u) + level(v) - 2 * level(a);
}

} // namespace cayley
