#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cayley {

using VertexIndex = std::uint64_t;
using Depth = unsigned;

/// Half-open range of consecutive vertex indices.
struct IndexRange {
    VertexIndex first = 0;
    VertexIndex last = 0;  // one past the end

    VertexIndex size() const { return last - first; }
    bool contains(VertexIndex v) const { return v >= first && v < last; }
    friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

class DepthLimitError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Cayley tree of order k with vertices numbered in breadth-first order.
///
/// The root x0 has index 0 and k+1 children; every other vertex has k
/// children. The sphere W_n occupies the index range
/// [ball_size(n-1), ball_size(n)), so the ball V_n is always a prefix
/// [0, ball_size(n)). Within a sphere, the children of a vertex are
/// consecutive and appear in the same order as their parents.
class TreeGeometry {
public:
    static constexpr Depth default_max_depth = 16;

    explicit TreeGeometry(unsigned order, Depth max_depth = default_max_depth);

    unsigned order() const { return order_; }
    Depth max_depth() const { return max_depth_; }

    VertexIndex sphere_size(Depth n) const;
    VertexIndex ball_size(Depth n) const;
    IndexRange sphere_vertices(Depth n) const;
    IndexRange ball_vertices(Depth n) const { return {0, ball_size(n)}; }

    /// Distance to the root. Throws DepthLimitError beyond max_depth.
    Depth level(VertexIndex v) const;
    /// Offset of v inside its sphere.
    VertexIndex position(VertexIndex v) const;
    VertexIndex vertex_at(Depth level, VertexIndex position) const;

    /// Parent of a non-root vertex. Throws std::invalid_argument for the root.
    VertexIndex parent(VertexIndex v) const;
    /// Children in increasing index order. Throws DepthLimitError when the
    /// children would lie beyond max_depth.
    IndexRange children(VertexIndex v) const;
    std::vector<VertexIndex> children_list(VertexIndex v) const;

    /// Number of edges on the unique path between u and v.
    Depth distance(VertexIndex u, VertexIndex v) const;
    VertexIndex lowest_common_ancestor(VertexIndex u, VertexIndex v) const;

    friend bool operator==(const TreeGeometry&, const TreeGeometry&) = default;

private:
    void require_depth(Depth n) const;

    unsigned order_;
    Depth max_depth_;
    std::vector<VertexIndex> ball_;  // ball_[n] = |V_n| for n <= max_depth
};

} // namespace cayley
