#pragma once

// Treatment assignment mechanisms: completely randomized designs and
// graph-cluster randomization over an epsilon-net clustering.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "spillover/error.hpp"
#include "spillover/graph.hpp"

namespace spillover {

struct CompletelyRandomized {
    std::size_t n_treated = 0;
};

struct ClusterBernoulli {
    double p = 0.5;
    std::vector<std::size_t> cluster_of;  // cluster index per vertex
};

/// Assignment read from data; the mechanism is not known to the library.
struct ObservedDesign {};

using Design = std::variant<CompletelyRandomized, ClusterBernoulli, ObservedDesign>;

struct TreatmentAssignment {
    std::vector<std::uint8_t> z;  // 0 = control, 1 = treated
    Design design = ObservedDesign{};

    std::size_t size() const noexcept { return z.size(); }
    bool treated(Vertex v) const { return z[v] != 0; }
    std::size_t treated_count() const { return static_cast<std::size_t>(std::count(z.begin(), z.end(), 1)); }
};

struct Clustering {
    std::vector<std::vector<Vertex>> clusters;  // each sorted ascending
    std::vector<Vertex> centers;
    std::size_t epsilon = 0;

    std::size_t size() const noexcept { return clusters.size(); }

    std::vector<std::size_t> membership(std::size_t n) const {
        std::vector<std::size_t> of(n, 0);
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            for (Vertex v : clusters[c]) of[v] = c;
        }
        return of;
    }
};

template <std::uniform_random_bit_generator Urbg>
TreatmentAssignment assign_completely_randomized(std::size_t n, std::size_t n_treated, Urbg& rng) {
    if (n_treated > n) {
        throw Error(Errc::InvalidCount, "n_treated = " + std::to_string(n_treated) + " > n = " + std::to_string(n));
    }
    std::vector<Vertex> order(n);
    std::iota(order.begin(), order.end(), Vertex{0});
    // Partial Fisher-Yates: the first n_treated slots are a uniform subset.
    for (std::size_t i = 0; i < n_treated; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(order[i], order[pick(rng)]);
    }
    TreatmentAssignment out;
    out.z.assign(n, 0);
    for (std::size_t i = 0; i < n_treated; ++i) out.z[order[i]] = 1;
    out.design = CompletelyRandomized{n_treated};
    return out;
}

/// Peeling epsilon-net. Vertices are ordered once by (degree, label)
/// ascending; the last unremoved vertex becomes the next center and takes
/// every unremoved vertex within `epsilon` hops of it (distances measured in
/// the full graph).
inline Clustering epsilon_net_clusters(const Graph& g, std::size_t epsilon) {
    const auto n = g.vertex_count();
    std::vector<Vertex> order(n);
    std::iota(order.begin(), order.end(), Vertex{0});
    const auto deg = labelled_degrees(g);
    std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return deg[a] < deg[b]; });

    Clustering out;
    out.epsilon = epsilon;
    std::vector<bool> removed(n, false);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const Vertex center = *it;
        if (removed[center]) continue;
        const auto dist = bfs_distances(g, center, epsilon);
        std::vector<Vertex> members;
        for (Vertex v = 0; v < n; ++v) {
            if (!removed[v] && dist[v].within(epsilon)) {
                removed[v] = true;
                members.push_back(v);
            }
        }
        out.centers.push_back(center);
        out.clusters.push_back(std::move(members));
    }
    return out;
}

/// Partition, radius and center-separation checks for an epsilon-net.
inline bool satisfies_net_invariants(const Graph& g, const Clustering& c) {
    const auto n = g.vertex_count();
    if (c.centers.size() != c.clusters.size()) return false;
    std::vector<int> hits(n, 0);
    for (std::size_t k = 0; k < c.clusters.size(); ++k) {
        const auto dist = bfs_distances(g, c.centers[k]);
        bool has_center = false;
        for (Vertex v : c.clusters[k]) {
            if (v >= n) return false;
            ++hits[v];
            if (!dist[v].within(c.epsilon)) return false;
            has_center = has_center || v == c.centers[k];
        }
        if (!has_center) return false;
        for (std::size_t other = 0; other < c.centers.size(); ++other) {
            if (other != k && dist[c.centers[other]].within(c.epsilon)) return false;
        }
    }
    return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

template <std::uniform_random_bit_generator Urbg>
TreatmentAssignment assign_cluster_bernoulli(const Clustering& clustering, std::size_t n, double p, Urbg& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::InvalidProbability, "cluster p = " + std::to_string(p));
    std::bernoulli_distribution coin(p);
    TreatmentAssignment out;
    out.z.assign(n, 0);
    for (const auto& members : clustering.clusters) {
        const std::uint8_t w = coin(rng) ? 1 : 0;
        for (Vertex v : members) out.z[v] = w;
    }
    out.design = ClusterBernoulli{p, clustering.membership(n)};
    return out;
}

}  // namespace spillover
