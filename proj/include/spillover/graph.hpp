#pragma once

// Undirected simple graphs on vertices 0..n-1.

#include <algorithm>
#include <compare>
#include <initializer_list>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spillover/error.hpp"

namespace spillover {

using Vertex = std::uint32_t;

/// Unordered vertex pair stored as u < v.
struct Edge {
    Vertex u = 0;
    Vertex v = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(Vertex a, Vertex b) noexcept { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Non-owning edge list plus vertex count. Edges need not be sorted, but must
/// be simple (no loops, no repeats). Used on sampler hot paths where building
/// a full Graph per draw would dominate.
struct EdgeListView {
    std::size_t vertex_count = 0;
    std::span<const Edge> edges;
};

/// Hop distance with an explicit "unreachable" state. There is deliberately no
/// ordering operator: `within` is the only comparison and it is false for
/// unreachable vertices.
class Distance {
public:
    constexpr Distance() noexcept = default;
    constexpr explicit Distance(std::uint32_t hops) noexcept : hops_(hops) {}

    static constexpr Distance unreachable() noexcept { return Distance{}; }

    constexpr bool finite() const noexcept { return hops_ != kInfinite; }
    constexpr std::uint32_t hops() const {
        if (!finite()) throw Error(Errc::InvalidSpec, "hops() on unreachable distance");
        return hops_;
    }
    constexpr bool within(std::size_t limit) const noexcept { return finite() && hops_ <= limit; }

    friend constexpr bool operator==(Distance, Distance) noexcept = default;

private:
    static constexpr std::uint32_t kInfinite = std::numeric_limits<std::uint32_t>::max();
    std::uint32_t hops_ = kInfinite;
};

class Graph {
public:
    Graph() = default;

    /// Validates and canonicalizes an arbitrary pair list. Duplicates and
    /// reversed pairs collapse to a single edge.
    Graph(std::size_t n, std::span<const std::pair<Vertex, Vertex>> pairs) : n_(n) {
        edges_.reserve(pairs.size());
        for (auto [a, b] : pairs) {
            if (a >= n || b >= n) {
                throw Error(Errc::OutOfRangeVertex, "edge (" + std::to_string(a) + ", " +
                                                        std::to_string(b) + ") with n = " +
                                                        std::to_string(n));
            }
            if (a == b) throw Error(Errc::SelfLoop, "vertex " + std::to_string(a));
            edges_.push_back(make_edge(a, b));
        }
        canonicalize();
        build_adjacency();
    }

    /// Accepts loop-free pairs in any order/orientation; checks range only.
    static Graph from_edges(std::size_t n, std::vector<Edge> edges) {
        Graph g;
        g.n_ = n;
        for (auto& e : edges) {
            if (e.u >= n || e.v >= n) throw Error(Errc::OutOfRangeVertex, "edge endpoint >= n");
            if (e.u == e.v) throw Error(Errc::SelfLoop, "vertex " + std::to_string(e.u));
            e = make_edge(e.u, e.v);
        }
        g.edges_ = std::move(edges);
        g.canonicalize();
        g.build_adjacency();
        return g;
    }

    std::size_t vertex_count() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    /// Sorted canonical edges.
    std::span<const Edge> edges() const noexcept { return edges_; }

    /// Sorted neighbor list of `v`.
    std::span<const Vertex> neighbors(Vertex v) const {
        check_vertex(v);
        return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
    }

    std::size_t degree(Vertex v) const {
        check_vertex(v);
        return offsets_[v + 1] - offsets_[v];
    }

    bool has_edge(Vertex a, Vertex b) const {
        if (a >= n_ || b >= n_ || a == b) return false;
        return std::binary_search(edges_.begin(), edges_.end(), make_edge(a, b));
    }

    EdgeListView view() const noexcept { return {n_, edges_}; }

    friend bool operator==(const Graph& a, const Graph& b) noexcept {
        return a.n_ == b.n_ && a.edges_ == b.edges_;
    }

private:
    void check_vertex(Vertex v) const {
        if (v >= n_) throw Error(Errc::OutOfRangeVertex, "vertex " + std::to_string(v));
    }

    void canonicalize() {
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    }

    // Walking sorted canonical edges appends each vertex's lower neighbors
    // before its higher ones, so every neighbor list comes out sorted.
    void build_adjacency() {
        offsets_.assign(n_ + 1, 0);
        for (const auto& e : edges_) {
            ++offsets_[e.u + 1];
            ++offsets_[e.v + 1];
        }
        std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
        neighbors_.resize(2 * edges_.size());
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (const auto& e : edges_) {
            neighbors_[fill[e.u]++] = e.v;
            neighbors_[fill[e.v]++] = e.u;
        }
    }

    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_ = {0};
    std::vector<Vertex> neighbors_;
};

inline Graph new_graph(std::size_t n, std::span<const std::pair<Vertex, Vertex>> pairs) {
    return Graph(n, pairs);
}

inline Graph new_graph(std::size_t n, std::initializer_list<std::pair<Vertex, Vertex>> pairs) {
    return Graph(n, std::span<const std::pair<Vertex, Vertex>>(pairs.begin(), pairs.size()));
}

/// Bijection on 0..n-1; maps vertex i to `(*this)[i]`.
class VertexPermutation {
public:
    VertexPermutation() = default;

    explicit VertexPermutation(std::vector<Vertex> mapping) : map_(std::move(mapping)) {
        std::vector<bool> seen(map_.size(), false);
        for (Vertex v : map_) {
            if (v >= map_.size() || seen[v]) {
                throw Error(Errc::NotABijection, "value " + std::to_string(v) + " repeated or out of range");
            }
            seen[v] = true;
        }
    }

    static VertexPermutation identity(std::size_t n) {
        VertexPermutation p;
        p.map_.resize(n);
        std::iota(p.map_.begin(), p.map_.end(), Vertex{0});
        return p;
    }

    std::size_t size() const noexcept { return map_.size(); }
    Vertex operator[](Vertex v) const { return map_[v]; }
    std::span<const Vertex> mapping() const noexcept { return map_; }

    VertexPermutation inverse() const {
        VertexPermutation inv;
        inv.map_.resize(map_.size());
        for (std::size_t i = 0; i < map_.size(); ++i) inv.map_[map_[i]] = static_cast<Vertex>(i);
        return inv;
    }

    friend bool operator==(const VertexPermutation&, const VertexPermutation&) = default;

private:
    std::vector<Vertex> map_;
};

inline std::vector<std::size_t> labelled_degrees(EdgeListView g) {
    std::vector<std::size_t> deg(g.vertex_count, 0);
    for (const auto& e : g.edges) {
        ++deg[e.u];
        ++deg[e.v];
    }
    return deg;
}

inline std::vector<std::size_t> labelled_degrees(const Graph& g) { return labelled_degrees(g.view()); }

/// Ascending.
inline std::vector<std::size_t> degree_sequence(const Graph& g) {
    auto deg = labelled_degrees(g);
    std::sort(deg.begin(), deg.end());
    return deg;
}

/// Breadth-first hop distances from `source`; stops expanding past `max_hops`.
inline std::vector<Distance> bfs_distances(const Graph& g, Vertex source,
                                           std::size_t max_hops = std::numeric_limits<std::size_t>::max()) {
    if (source >= g.vertex_count()) {
        throw Error(Errc::OutOfRangeVertex, "bfs source " + std::to_string(source));
    }
    std::vector<Distance> dist(g.vertex_count());
    std::vector<Vertex> frontier{source};
    dist[source] = Distance(0);
    std::vector<Vertex> next;
    for (std::uint32_t depth = 1; !frontier.empty() && depth <= max_hops; ++depth) {
        next.clear();
        for (Vertex v : frontier) {
            for (Vertex w : g.neighbors(v)) {
                if (!dist[w].finite()) {
                    dist[w] = Distance(depth);
                    next.push_back(w);
                }
            }
        }
        frontier.swap(next);
    }
    return dist;
}

struct InducedSubgraph {
    Graph graph;
    /// original_label[k] is the original vertex that became vertex k.
    std::vector<Vertex> original_label;
};

/// Keeps edges with both endpoints in `vertex_set`; retained vertices are
/// relabelled densely in ascending original order.
inline InducedSubgraph induced_subgraph(const Graph& g, std::span<const Vertex> vertex_set) {
    constexpr Vertex kAbsent = std::numeric_limits<Vertex>::max();
    std::vector<Vertex> new_label(g.vertex_count(), kAbsent);
    for (Vertex v : vertex_set) {
        if (v >= g.vertex_count()) throw Error(Errc::OutOfRangeVertex, "vertex " + std::to_string(v));
        new_label[v] = 0;
    }
    InducedSubgraph out;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        if (new_label[v] != kAbsent) {
            new_label[v] = static_cast<Vertex>(out.original_label.size());
            out.original_label.push_back(v);
        }
    }
    std::vector<Edge> kept;
    for (const auto& e : g.edges()) {
        if (new_label[e.u] != kAbsent && new_label[e.v] != kAbsent) {
            kept.push_back(make_edge(new_label[e.u], new_label[e.v]));
        }
    }
    out.graph = Graph::from_edges(out.original_label.size(), std::move(kept));
    return out;
}

/// Writes the image of each edge under `pi` into `out` (not canonicalized).
inline void relabel_edges(std::span<const Edge> edges, const VertexPermutation& pi, std::vector<Edge>& out) {
    out.resize(edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k) out[k] = Edge{pi[edges[k].u], pi[edges[k].v]};
}

inline Graph relabel(const Graph& g, const VertexPermutation& pi) {
    if (pi.size() != g.vertex_count()) {
        throw Error(Errc::LengthMismatch, "permutation of size " + std::to_string(pi.size()) +
                                              " for graph with n = " + std::to_string(g.vertex_count()));
    }
    std::vector<Edge> image;
    relabel_edges(g.edges(), pi, image);
    return Graph::from_edges(g.vertex_count(), std::move(image));
}

}  // namespace spillover
