#pragma once

// Random-graph generators used as data-generating processes: Erdos-Renyi
// (both G(n,p) and G(n,m)), Watts-Strogatz small world, and stochastic block
// models with contiguous block labelling.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "spillover/error.hpp"
#include "spillover/graph.hpp"
#include "spillover/random.hpp"

namespace spillover {

struct SmallWorldSpec {
    std::size_t n = 599;
    std::size_t k = 10;  // initial neighbors per vertex, even
    double p_rewire = 0.1;

    void validate() const {
        if (k % 2 != 0) throw Error(Errc::InvalidSpec, "small-world K must be even");
        if (k >= n) throw Error(Errc::InvalidSpec, "small-world K must be < n");
        if (!(p_rewire >= 0.0 && p_rewire <= 1.0)) throw Error(Errc::InvalidSpec, "p_rewire outside [0,1]");
    }
};

struct SbmSpec {
    std::vector<std::size_t> block_sizes;
    std::vector<std::vector<double>> pref;  // K x K, symmetric

    std::size_t vertex_count() const {
        std::size_t n = 0;
        for (auto s : block_sizes) n += s;
        return n;
    }

    void validate() const {
        const auto k = block_sizes.size();
        if (pref.size() != k) throw Error(Errc::InvalidSpec, "preference matrix has wrong row count");
        for (std::size_t a = 0; a < k; ++a) {
            if (pref[a].size() != k) throw Error(Errc::InvalidSpec, "preference matrix is not square");
            for (std::size_t b = 0; b < k; ++b) {
                const double p = pref[a][b];
                if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::InvalidSpec, "preference entry outside [0,1]");
                if (p != pref[b][a]) throw Error(Errc::InvalidSpec, "preference matrix is not symmetric");
            }
        }
    }

    /// Five-block configuration with 599 vertices used in the reference
    /// simulation study.
    static SbmSpec reference() {
        SbmSpec s;
        s.block_sizes = {50, 100, 40, 110, 299};
        const std::vector<double> diag = {0.08, 0.05, 0.05, 0.05, 0.09};
        s.pref.assign(5, std::vector<double>(5, 0.01));
        for (std::size_t a = 0; a < 5; ++a) s.pref[a][a] = diag[a];
        return s;
    }
};

namespace detail {

inline void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::InvalidProbability, "p = " + std::to_string(p));
}

/// Decodes k in [0, C(s,2)) into the pair (i, j), i < j, with k = j(j-1)/2 + i.
inline Edge decode_triangular(std::uint64_t k) {
    auto j = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(k))) / 2.0);
    while (j * (j - 1) / 2 > k) --j;
    while ((j + 1) * j / 2 <= k) ++j;
    const auto i = k - j * (j - 1) / 2;
    return Edge{static_cast<Vertex>(i), static_cast<Vertex>(j)};
}

inline std::uint64_t pair_count(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

}  // namespace detail

template <std::uniform_random_bit_generator Urbg>
Graph gen_erdos_renyi_gnp(std::size_t n, double p, Urbg& rng) {
    detail::check_probability(p);
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(static_cast<double>(detail::pair_count(n)) * p * 1.1) + 16);
    for_each_bernoulli_index(detail::pair_count(n), p, rng,
                             [&](std::uint64_t k) { edges.push_back(detail::decode_triangular(k)); });
    return Graph::from_edges(n, std::move(edges));
}

/// Uniform over all graphs with exactly m edges (Floyd's subset sampling on
/// the linearized pair index).
template <std::uniform_random_bit_generator Urbg>
Graph gen_erdos_renyi_gnm(std::size_t n, std::size_t m, Urbg& rng) {
    const std::uint64_t total = detail::pair_count(n);
    if (m > total) {
        throw Error(Errc::TooManyEdges, std::to_string(m) + " edges requested, only " + std::to_string(total) +
                                            " pairs");
    }
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(m * 2);
    for (std::uint64_t j = total - m; j < total; ++j) {
        const auto t = std::uniform_int_distribution<std::uint64_t>(0, j)(rng);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<Edge> edges;
    edges.reserve(m);
    for (auto k : chosen) edges.push_back(detail::decode_triangular(k));
    return Graph::from_edges(n, std::move(edges));
}

/// Maximum-likelihood edge probability |E| / C(n,2).
inline double estimate_er_p(const Graph& g) {
    if (g.vertex_count() < 2) throw Error(Errc::TooFewVertices, "need at least 2 vertices");
    return static_cast<double>(g.edge_count()) / static_cast<double>(detail::pair_count(g.vertex_count()));
}

/// Ring lattice (i ~ i+1..i+K/2 mod n), then each lattice edge is rewired with
/// probability p_rewire by moving its far endpoint to a uniform vertex that
/// creates neither a loop nor a duplicate. Edges whose near endpoint is
/// already adjacent to every vertex stay in place, so |E| = nK/2 always.
template <std::uniform_random_bit_generator Urbg>
Graph gen_small_world(const SmallWorldSpec& spec, Urbg& rng) {
    spec.validate();
    const std::size_t n = spec.n;
    const std::size_t half = spec.k / 2;
    auto key = [n](Vertex a, Vertex b) {
        const auto e = make_edge(a, b);
        return static_cast<std::uint64_t>(e.u) * n + e.v;
    };

    std::vector<Edge> edges;  // edge slot (i, i+j) for j-major ordering
    edges.reserve(n * half);
    std::unordered_set<std::uint64_t> present;
    present.reserve(n * half * 2);
    std::vector<std::size_t> degree(n, spec.k);
    for (std::size_t j = 1; j <= half; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto a = static_cast<Vertex>(i);
            const auto b = static_cast<Vertex>((i + j) % n);
            edges.push_back(Edge{a, b});
            present.insert(key(a, b));
        }
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<Vertex> pick(0, static_cast<Vertex>(n - 1));
    for (auto& e : edges) {
        if (unit(rng) >= spec.p_rewire) continue;
        const Vertex a = e.u;
        if (degree[a] >= n - 1) continue;
        Vertex w = pick(rng);
        while (w == a || present.contains(key(a, w))) w = pick(rng);
        present.erase(key(a, e.v));
        present.insert(key(a, w));
        --degree[e.v];
        ++degree[w];
        e.v = w;
    }
    return Graph::from_edges(n, std::move(edges));
}

/// Vertices 0..n_1-1 form block 0, the next n_2 block 1, and so on.
template <std::uniform_random_bit_generator Urbg>
Graph gen_sbm(const SbmSpec& spec, Urbg& rng) {
    spec.validate();
    const auto k = spec.block_sizes.size();
    std::vector<std::size_t> offset(k + 1, 0);
    for (std::size_t a = 0; a < k; ++a) offset[a + 1] = offset[a] + spec.block_sizes[a];

    std::vector<Edge> edges;
    for (std::size_t a = 0; a < k; ++a) {
        const auto base = static_cast<Vertex>(offset[a]);
        for_each_bernoulli_index(detail::pair_count(spec.block_sizes[a]), spec.pref[a][a], rng,
                                 [&](std::uint64_t idx) {
                                     const auto e = detail::decode_triangular(idx);
                                     edges.push_back(Edge{base + e.u, base + e.v});
                                 });
        for (std::size_t b = a + 1; b < k; ++b) {
            const std::uint64_t cols = spec.block_sizes[b];
            for_each_bernoulli_index(spec.block_sizes[a] * cols, spec.pref[a][b], rng, [&](std::uint64_t idx) {
                edges.push_back(Edge{static_cast<Vertex>(offset[a] + idx / cols),
                                     static_cast<Vertex>(offset[b] + idx % cols)});
            });
        }
    }
    return Graph::from_edges(offset[k], std::move(edges));
}

}  // namespace spillover
