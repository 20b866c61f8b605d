#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "spillover/graph.hpp"
#include "test_support.hpp"

using namespace spillover;
using spillover::testing::random_graph;

namespace {

Graph path3() { return new_graph(3, {{0, 1}, {1, 2}}); }
Graph triangle() { return new_graph(3, {{0, 1}, {1, 2}, {0, 2}}); }
Graph star4() { return new_graph(4, {{0, 1}, {0, 2}, {0, 3}}); }

std::vector<std::size_t> hops(const std::vector<Distance>& d) {
    std::vector<std::size_t> out;
    for (const auto& x : d) out.push_back(x.finite() ? x.hops() : 999);
    return out;
}

}  // namespace

TEST(NewGraph, CollapsesDuplicatesAndOrientation) {
    const auto g = new_graph(3, {{0, 1}, {1, 0}, {1, 2}});
    EXPECT_EQ(g.edge_count(), 2U);
    EXPECT_EQ(g.edges()[0], (Edge{0, 1}));
    EXPECT_EQ(g.edges()[1], (Edge{1, 2}));
}

TEST(NewGraph, RejectsSelfLoop) {
    try {
        new_graph(2, {{0, 0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::SelfLoop);
    }
}

TEST(NewGraph, RejectsOutOfRange) {
    try {
        new_graph(2, {{0, 2}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::OutOfRangeVertex);
    }
}

TEST(NewGraph, EmptyGraph) {
    const auto g = new_graph(0, {});
    EXPECT_EQ(g.vertex_count(), 0U);
    EXPECT_EQ(g.edge_count(), 0U);
}

TEST(NewGraph, NeighborsSortedAndSymmetric) {
    const auto g = new_graph(5, {{3, 1}, {1, 0}, {4, 1}, {2, 4}});
    const auto n1 = g.neighbors(1);
    EXPECT_TRUE(std::is_sorted(n1.begin(), n1.end()));
    EXPECT_EQ(std::vector<Vertex>(n1.begin(), n1.end()), (std::vector<Vertex>{0, 3, 4}));
    EXPECT_TRUE(g.has_edge(4, 2));
    EXPECT_TRUE(g.has_edge(2, 4));
    EXPECT_FALSE(g.has_edge(0, 4));
}

TEST(LabelledDegrees, Examples) {
    EXPECT_EQ(labelled_degrees(triangle()), (std::vector<std::size_t>{2, 2, 2}));
    EXPECT_EQ(labelled_degrees(path3()), (std::vector<std::size_t>{1, 2, 1}));
    EXPECT_EQ(labelled_degrees(new_graph(4, {})), (std::vector<std::size_t>{0, 0, 0, 0}));
}

TEST(DegreeSequence, Examples) {
    EXPECT_EQ(degree_sequence(star4()), (std::vector<std::size_t>{1, 1, 1, 3}));
    EXPECT_EQ(degree_sequence(new_graph(2, {})), (std::vector<std::size_t>{0, 0}));
}

TEST(DegreeSequence, NonIsomorphicGraphsCanShareOne) {
    const auto c6 = new_graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}});
    const auto two_triangles = new_graph(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
    EXPECT_EQ(degree_sequence(c6), degree_sequence(two_triangles));
    EXPECT_EQ(degree_sequence(c6), std::vector<std::size_t>(6, 2));
    // Connectivity tells them apart.
    EXPECT_TRUE(bfs_distances(c6, 0)[3].finite());
    EXPECT_FALSE(bfs_distances(two_triangles, 0)[3].finite());
}

TEST(Bfs, Examples) {
    EXPECT_EQ(hops(bfs_distances(path3(), 0)), (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(hops(bfs_distances(triangle(), 1)), (std::vector<std::size_t>{1, 0, 1}));
    const auto split = new_graph(3, {{0, 1}});
    const auto d = bfs_distances(split, 0);
    EXPECT_TRUE(d[1].finite());
    EXPECT_FALSE(d[2].finite());
    EXPECT_EQ(d[2], Distance::unreachable());
}

TEST(Bfs, UnreachableIsNeverWithinAnyRadius) {
    const auto d = bfs_distances(new_graph(2, {}), 0);
    EXPECT_FALSE(d[1].within(0));
    EXPECT_FALSE(d[1].within(1000000));
    EXPECT_TRUE(d[0].within(0));
}

TEST(Bfs, RejectsOutOfRangeSource) {
    try {
        bfs_distances(path3(), 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::OutOfRangeVertex);
    }
}

TEST(InducedSubgraph, Examples) {
    const Vertex pair[] = {0, 1};
    const auto k = induced_subgraph(triangle(), pair);
    EXPECT_EQ(k.graph.vertex_count(), 2U);
    EXPECT_EQ(k.graph.edge_count(), 1U);

    const Vertex leaves[] = {1, 2, 3};
    const auto s = induced_subgraph(star4(), leaves);
    EXPECT_EQ(s.graph.vertex_count(), 3U);
    EXPECT_EQ(s.graph.edge_count(), 0U);
    EXPECT_EQ(s.original_label, (std::vector<Vertex>{1, 2, 3}));
}

TEST(InducedSubgraph, FullSetIsIdentity) {
    const auto g = star4();
    const std::vector<Vertex> all = {0, 1, 2, 3};
    EXPECT_EQ(induced_subgraph(g, all).graph, g);
}

TEST(InducedSubgraph, RejectsOutOfRange) {
    const Vertex bad[] = {0, 7};
    EXPECT_THROW(induced_subgraph(triangle(), bad), Error);
}

TEST(Relabel, Examples) {
    const auto p = path3();
    EXPECT_EQ(relabel(p, VertexPermutation::identity(3)), p);
    EXPECT_EQ(relabel(p, VertexPermutation({2, 1, 0})), p);
}

TEST(Relabel, Errors) {
    try {
        relabel(path3(), VertexPermutation::identity(4));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::LengthMismatch);
    }
    try {
        VertexPermutation bad({0, 0, 1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NotABijection);
    }
}

// ---------------------------------------------------------------------------
// Properties over random graphs.

TEST(GraphProperties, DegreeSumAndMaxDegree) {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto g = random_graph(1 + trial % 30, 0.3, rng);
        const auto deg = labelled_degrees(g);
        EXPECT_EQ(std::accumulate(deg.begin(), deg.end(), std::size_t{0}), 2 * g.edge_count());
        for (auto d : deg) EXPECT_LE(d, g.vertex_count() - 1);
    }
}

TEST(GraphProperties, RelabelPreservesStructureAndInverts) {
    Rng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 25;
        const auto g = random_graph(n, 0.25, rng);
        std::vector<Vertex> map(n);
        std::iota(map.begin(), map.end(), Vertex{0});
        std::shuffle(map.begin(), map.end(), rng);
        const VertexPermutation pi(map);
        const auto h = relabel(g, pi);
        EXPECT_EQ(h.edge_count(), g.edge_count());
        EXPECT_EQ(degree_sequence(h), degree_sequence(g));
        const auto dg = labelled_degrees(g);
        const auto dh = labelled_degrees(h);
        for (Vertex v = 0; v < n; ++v) EXPECT_EQ(dh[pi[v]], dg[v]);
        for (const auto& e : g.edges()) EXPECT_TRUE(h.has_edge(pi[e.u], pi[e.v]));
        EXPECT_EQ(relabel(h, pi.inverse()), g);
    }
}

TEST(GraphProperties, BfsTriangleInequality) {
    Rng rng(13);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 5 + trial % 20;
        const auto g = random_graph(n, 0.2, rng);
        std::vector<std::vector<Distance>> d;
        for (Vertex v = 0; v < n; ++v) d.push_back(bfs_distances(g, v));
        for (Vertex a = 0; a < n; ++a) {
            for (Vertex b = 0; b < n; ++b) {
                for (Vertex c = 0; c < n; ++c) {
                    if (!d[a][b].finite() || !d[b][c].finite()) continue;
                    ASSERT_TRUE(d[a][c].finite());
                    EXPECT_LE(d[a][c].hops(), d[a][b].hops() + d[b][c].hops());
                }
            }
        }
    }
}

TEST(GraphProperties, InducedSubgraphShrinks) {
    Rng rng(14);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + trial % 20;
        const auto g = random_graph(n, 0.3, rng);
        std::vector<Vertex> subset;
        std::bernoulli_distribution keep(0.6);
        for (Vertex v = 0; v < n; ++v) {
            if (keep(rng)) subset.push_back(v);
        }
        const auto s = induced_subgraph(g, subset);
        EXPECT_LE(s.graph.edge_count(), g.edge_count());
        const auto dg = labelled_degrees(g);
        const auto ds = labelled_degrees(s.graph);
        for (Vertex k = 0; k < subset.size(); ++k) EXPECT_LE(ds[k], dg[s.original_label[k]]);
        for (const auto& e : s.graph.edges()) {
            EXPECT_TRUE(g.has_edge(s.original_label[e.u], s.original_label[e.v]));
        }
    }
}
