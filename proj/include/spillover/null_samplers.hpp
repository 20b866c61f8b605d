#pragma once

// Samplers over the conditional null classes of the graph:
//
//   DegreeSequence     graphs with the observed labelled degree vector,
//                      reached by a double-edge-swap Markov chain
//   DegreeIsomorphism  relabelings by permutations that only move vertices
//                      within a degree class
//   BlockIsomorphism   as above, but permutations also preserve treatment
//                      status, so the treated and control induced subgraphs
//                      stay isomorphic to the observed ones
//   ErdosRenyi         independent G(n, p) draws (known or estimated p)
//
// Isomorphism modes are uniform over permutations, not over distinct image
// graphs: an image with a nontrivial stabilizer is counted once per
// permutation producing it.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "spillover/designs.hpp"
#include "spillover/error.hpp"
#include "spillover/graph.hpp"
#include "spillover/graph_models.hpp"
#include "spillover/random.hpp"

namespace spillover {

enum class NullClassMode {
    DegreeSequence,
    DegreeIsomorphism,
    BlockIsomorphism,
    ErdosRenyi,
    ErdosRenyiEstimated,
};

constexpr std::string_view to_string(NullClassMode m) noexcept {
    switch (m) {
        case NullClassMode::DegreeSequence: return "degseq";
        case NullClassMode::DegreeIsomorphism: return "iso";
        case NullClassMode::BlockIsomorphism: return "blockiso";
        case NullClassMode::ErdosRenyi: return "er";
        case NullClassMode::ErdosRenyiEstimated: return "er-hat";
    }
    return "unknown";
}

inline NullClassMode parse_null_class(std::string_view s) {
    for (auto m : {NullClassMode::DegreeSequence, NullClassMode::DegreeIsomorphism, NullClassMode::BlockIsomorphism,
                   NullClassMode::ErdosRenyi, NullClassMode::ErdosRenyiEstimated}) {
        if (to_string(m) == s) return m;
    }
    throw Error(Errc::InvalidSpec, "unknown null class '" + std::string(s) + "'");
}

struct SwapChainConfig {
    std::uint64_t burn_in_swaps = 0;
    std::uint64_t swaps_between_samples = 0;

    /// Swap counts as multiples of the edge count.
    static SwapChainConfig from_multipliers(std::size_t edge_count, double burn_in_mult = 100.0,
                                            double thin_mult = 10.0) {
        if (burn_in_mult < 0 || thin_mult < 0) throw Error(Errc::InvalidSpec, "negative swap multiplier");
        return {static_cast<std::uint64_t>(burn_in_mult * static_cast<double>(edge_count)),
                static_cast<std::uint64_t>(thin_mult * static_cast<double>(edge_count))};
    }
};

/// Edge membership for the swap chain: a bit matrix for graphs up to
/// kDenseLimit vertices, a hash set beyond.
class AdjacencyIndex {
public:
    static constexpr std::size_t kDenseLimit = 8192;

    AdjacencyIndex() = default;

    AdjacencyIndex(std::size_t n, std::span<const Edge> edges) : n_(n), dense_(n <= kDenseLimit) {
        if (dense_) {
            bits_.assign((n * n + 63) / 64, 0);
        } else {
            sparse_.reserve(edges.size() * 2);
        }
        for (const auto& e : edges) insert(e.u, e.v);
    }

    bool contains(Vertex a, Vertex b) const {
        const auto k = key(a, b);
        if (dense_) return (bits_[k >> 6] >> (k & 63)) & 1U;
        return sparse_.contains(k);
    }

    void insert(Vertex a, Vertex b) {
        const auto k = key(a, b);
        if (dense_) {
            bits_[k >> 6] |= std::uint64_t{1} << (k & 63);
        } else {
            sparse_.insert(k);
        }
    }

    void erase(Vertex a, Vertex b) {
        const auto k = key(a, b);
        if (dense_) {
            bits_[k >> 6] &= ~(std::uint64_t{1} << (k & 63));
        } else {
            sparse_.erase(k);
        }
    }

private:
    std::uint64_t key(Vertex a, Vertex b) const {
        const auto e = make_edge(a, b);
        return static_cast<std::uint64_t>(e.u) * n_ + e.v;
    }

    std::size_t n_ = 0;
    bool dense_ = true;
    std::vector<std::uint64_t> bits_;
    std::unordered_set<std::uint64_t> sparse_;
};

/// Mutable edge array + membership index; the state of a swap chain.
class SwapState {
public:
    explicit SwapState(const Graph& g)
        : n_(g.vertex_count()), edges_(g.edges().begin(), g.edges().end()), index_(n_, edges_) {}

    std::size_t vertex_count() const noexcept { return n_; }
    std::span<const Edge> edges() const noexcept { return edges_; }
    EdgeListView view() const noexcept { return {n_, edges_}; }
    Graph to_graph() const { return Graph::from_edges(n_, edges_); }

    std::uint64_t accepted() const noexcept { return accepted_; }
    std::uint64_t rejected() const noexcept { return rejected_; }

    template <std::uniform_random_bit_generator Urbg>
    friend bool double_edge_swap_step(SwapState& s, Urbg& rng);

private:
    std::size_t n_;
    std::vector<Edge> edges_;
    AdjacencyIndex index_;
    std::uint64_t accepted_ = 0;
    std::uint64_t rejected_ = 0;
};

/// One proposal of the double-edge-swap chain. Picks two distinct edges
/// (a,b), (c,d) uniformly and, with equal probability, proposes (a,d),(c,b)
/// or (a,c),(b,d). The move is applied only if it creates no loop and no
/// duplicate; every vertex keeps its degree either way.
template <std::uniform_random_bit_generator Urbg>
bool double_edge_swap_step(SwapState& s, Urbg& rng) {
    const std::size_t m = s.edges_.size();
    if (m < 2) {
        ++s.rejected_;
        return false;
    }
    const std::size_t i = uniform_below(rng, m);
    std::size_t j = uniform_below(rng, m - 1);
    if (j >= i) ++j;
    const bool cross = (rng() & 1U) != 0;

    const auto [a, b] = s.edges_[i];
    const auto [c, d] = s.edges_[j];
    Vertex p1 = a, q1 = d, p2 = c, q2 = b;
    if (cross) {
        q1 = c;
        p2 = b;
        q2 = d;
    }
    if (p1 == q1 || p2 == q2 || s.index_.contains(p1, q1) || s.index_.contains(p2, q2)) {
        ++s.rejected_;
        return false;
    }
    s.index_.erase(a, b);
    s.index_.erase(c, d);
    s.index_.insert(p1, q1);
    s.index_.insert(p2, q2);
    s.edges_[i] = make_edge(p1, q1);
    s.edges_[j] = make_edge(p2, q2);
    ++s.accepted_;
    return true;
}

/// Vertices grouped into cells; a sampled permutation shuffles each cell.
class CellPermuter {
public:
    CellPermuter() = default;

    /// `cell_key[v]` identifies v's cell; vertices sharing a key are exchangeable.
    explicit CellPermuter(std::span<const std::uint64_t> cell_key) : perm_(cell_key.size()) {
        std::map<std::uint64_t, std::vector<Vertex>> by_key;
        for (Vertex v = 0; v < cell_key.size(); ++v) by_key[cell_key[v]].push_back(v);
        for (auto& [k, members] : by_key) {
            if (members.size() > 1) cells_.push_back(std::move(members));
        }
        std::iota(perm_.begin(), perm_.end(), Vertex{0});
    }

    std::span<const std::vector<Vertex>> cells() const noexcept { return cells_; }

    /// Uniform over the product of symmetric groups on the cells.
    template <std::uniform_random_bit_generator Urbg>
    std::span<const Vertex> draw(Urbg& rng) {
        for (const auto& cell : cells_) {
            scratch_.assign(cell.begin(), cell.end());
            std::shuffle(scratch_.begin(), scratch_.end(), rng);
            for (std::size_t k = 0; k < cell.size(); ++k) perm_[cell[k]] = scratch_[k];
        }
        return perm_;
    }

private:
    std::vector<std::vector<Vertex>> cells_;
    std::vector<Vertex> perm_;
    std::vector<Vertex> scratch_;
};

inline std::vector<std::uint64_t> degree_cells(const Graph& g) {
    const auto deg = labelled_degrees(g);
    return {deg.begin(), deg.end()};
}

inline std::vector<std::uint64_t> degree_treatment_cells(const Graph& g, const TreatmentAssignment& z) {
    if (z.size() != g.vertex_count()) {
        throw Error(Errc::LengthMismatch, "assignment length " + std::to_string(z.size()) + " vs n = " +
                                              std::to_string(g.vertex_count()));
    }
    const auto deg = labelled_degrees(g);
    std::vector<std::uint64_t> key(deg.size());
    for (std::size_t v = 0; v < deg.size(); ++v) key[v] = 2 * static_cast<std::uint64_t>(deg[v]) + z.z[v];
    return key;
}

// ---------------------------------------------------------------------------
// Streaming samplers. `next(rng)` returns the edges of the next null draw; the
// span stays valid until the following call. Edges are simple but not sorted.

/// Zero-step chain: always returns the observed graph.
class FixedSampler {
public:
    explicit FixedSampler(const Graph& g) : g_(&g) {}
    std::size_t vertex_count() const noexcept { return g_->vertex_count(); }

    template <std::uniform_random_bit_generator Urbg>
    std::span<const Edge> next(Urbg&) {
        return g_->edges();
    }

private:
    const Graph* g_;
};

class DegreeSequenceSampler {
public:
    DegreeSequenceSampler(const Graph& g, SwapChainConfig cfg) : state_(g), cfg_(cfg) {}
    std::size_t vertex_count() const noexcept { return state_.vertex_count(); }

    template <std::uniform_random_bit_generator Urbg>
    std::span<const Edge> next(Urbg& rng) {
        const auto steps = started_ ? cfg_.swaps_between_samples : cfg_.burn_in_swaps;
        started_ = true;
        for (std::uint64_t k = 0; k < steps; ++k) double_edge_swap_step(state_, rng);
        return state_.edges();
    }

    const SwapState& state() const noexcept { return state_; }

private:
    SwapState state_;
    SwapChainConfig cfg_;
    bool started_ = false;
};

/// Relabels the observed graph by a uniformly drawn cell-preserving permutation.
class PermutationSampler {
public:
    PermutationSampler(const Graph& g, std::span<const std::uint64_t> cell_key) : g_(&g), permuter_(cell_key) {}

    std::size_t vertex_count() const noexcept { return g_->vertex_count(); }

    template <std::uniform_random_bit_generator Urbg>
    std::span<const Edge> next(Urbg& rng) {
        last_ = permuter_.draw(rng);
        buffer_.resize(g_->edge_count());
        const auto edges = g_->edges();
        for (std::size_t k = 0; k < edges.size(); ++k) buffer_[k] = Edge{last_[edges[k].u], last_[edges[k].v]};
        return buffer_;
    }

    /// Permutation behind the most recent draw.
    std::span<const Vertex> last_permutation() const noexcept { return last_; }

private:
    const Graph* g_;
    CellPermuter permuter_;
    std::span<const Vertex> last_;
    std::vector<Edge> buffer_;
};

class ErdosRenyiSampler {
public:
    ErdosRenyiSampler(std::size_t n, double p) : n_(n), p_(p) { detail::check_probability(p); }
    std::size_t vertex_count() const noexcept { return n_; }
    double p() const noexcept { return p_; }

    template <std::uniform_random_bit_generator Urbg>
    std::span<const Edge> next(Urbg& rng) {
        buffer_.clear();
        for_each_bernoulli_index(detail::pair_count(n_), p_, rng,
                                 [&](std::uint64_t k) { buffer_.push_back(detail::decode_triangular(k)); });
        return buffer_;
    }

private:
    std::size_t n_;
    double p_;
    std::vector<Edge> buffer_;
};

using AnySampler = std::variant<FixedSampler, DegreeSequenceSampler, PermutationSampler, ErdosRenyiSampler>;

struct SamplerOptions {
    double burn_in_mult = 100.0;
    double thin_mult = 10.0;
    double er_p = 0.2;  // used by NullClassMode::ErdosRenyi
};

/// Builds the sampler for `mode`. `z` is required for BlockIsomorphism only.
/// The returned sampler keeps a reference to `g`.
inline AnySampler make_sampler(NullClassMode mode, const Graph& g, const TreatmentAssignment* z,
                               const SamplerOptions& opts = {}) {
    switch (mode) {
        case NullClassMode::DegreeSequence:
            return DegreeSequenceSampler(
                g, SwapChainConfig::from_multipliers(g.edge_count(), opts.burn_in_mult, opts.thin_mult));
        case NullClassMode::DegreeIsomorphism: {
            const auto key = degree_cells(g);
            return PermutationSampler(g, key);
        }
        case NullClassMode::BlockIsomorphism: {
            if (z == nullptr) throw Error(Errc::InvalidSpec, "block isomorphism needs a treatment assignment");
            const auto key = degree_treatment_cells(g, *z);
            return PermutationSampler(g, key);
        }
        case NullClassMode::ErdosRenyi: return ErdosRenyiSampler(g.vertex_count(), opts.er_p);
        case NullClassMode::ErdosRenyiEstimated: return ErdosRenyiSampler(g.vertex_count(), estimate_er_p(g));
    }
    throw Error(Errc::InvalidSpec, "unknown null class");
}

template <std::uniform_random_bit_generator Urbg>
std::span<const Edge> next_draw(AnySampler& sampler, Urbg& rng) {
    return std::visit([&](auto& s) { return s.next(rng); }, sampler);
}

// ---------------------------------------------------------------------------
// Graph-valued convenience API.

/// M graphs from one swap chain started at `g_obs`.
template <std::uniform_random_bit_generator Urbg>
std::vector<Graph> sample_same_degree_sequence(const Graph& g_obs, SwapChainConfig cfg, std::size_t count,
                                               Urbg& rng) {
    DegreeSequenceSampler chain(g_obs, cfg);
    std::vector<Graph> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const auto edges = chain.next(rng);
        out.push_back(Graph::from_edges(g_obs.vertex_count(), {edges.begin(), edges.end()}));
    }
    return out;
}

struct PermutedGraph {
    Graph graph;
    VertexPermutation permutation;
};

template <std::uniform_random_bit_generator Urbg>
PermutedGraph sample_degree_isomorphism_with_witness(const Graph& g_obs, Urbg& rng) {
    const auto key = degree_cells(g_obs);
    CellPermuter permuter(key);
    const auto perm = permuter.draw(rng);
    VertexPermutation pi({perm.begin(), perm.end()});
    return {relabel(g_obs, pi), std::move(pi)};
}

template <std::uniform_random_bit_generator Urbg>
Graph sample_degree_isomorphism(const Graph& g_obs, Urbg& rng) {
    return sample_degree_isomorphism_with_witness(g_obs, rng).graph;
}

template <std::uniform_random_bit_generator Urbg>
PermutedGraph sample_block_isomorphism_with_witness(const Graph& g_obs, const TreatmentAssignment& z_obs,
                                                    Urbg& rng) {
    const auto key = degree_treatment_cells(g_obs, z_obs);
    CellPermuter permuter(key);
    const auto perm = permuter.draw(rng);
    VertexPermutation pi({perm.begin(), perm.end()});
    return {relabel(g_obs, pi), std::move(pi)};
}

template <std::uniform_random_bit_generator Urbg>
Graph sample_block_isomorphism(const Graph& g_obs, const TreatmentAssignment& z_obs, Urbg& rng) {
    return sample_block_isomorphism_with_witness(g_obs, z_obs, rng).graph;
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration (small graphs only).

struct NullClassMember {
    Graph graph;
    std::size_t multiplicity = 1;
};

inline constexpr std::size_t kMaxEnumerationVertices = 10;

namespace detail {

inline void enumerate_degree_class(std::size_t n, std::vector<std::size_t>& remaining, Vertex v,
                                   std::vector<Edge>& current, std::vector<NullClassMember>& out);

// Chooses `need` more partners for vertex v among candidates j >= from.
inline void choose_partners(std::size_t n, std::vector<std::size_t>& remaining, Vertex v, Vertex from,
                            std::size_t need, std::vector<Edge>& current, std::vector<NullClassMember>& out) {
    if (need == 0) {
        enumerate_degree_class(n, remaining, v + 1, current, out);
        return;
    }
    for (Vertex j = from; j < n; ++j) {
        if (remaining[j] == 0) continue;
        --remaining[j];
        current.push_back(Edge{v, j});
        choose_partners(n, remaining, v, j + 1, need - 1, current, out);
        current.pop_back();
        ++remaining[j];
    }
}

inline void enumerate_degree_class(std::size_t n, std::vector<std::size_t>& remaining, Vertex v,
                                   std::vector<Edge>& current, std::vector<NullClassMember>& out) {
    if (v == n) {
        out.push_back({Graph::from_edges(n, current), 1});
        return;
    }
    const std::size_t need = remaining[v];
    remaining[v] = 0;
    choose_partners(n, remaining, v, v + 1, need, current, out);
    remaining[v] = need;
}

inline std::vector<NullClassMember> enumerate_permutation_images(const Graph& g,
                                                                 std::span<const std::uint64_t> cell_key) {
    CellPermuter layout(cell_key);
    const auto cells = layout.cells();
    std::vector<std::vector<Vertex>> images(cells.begin(), cells.end());
    std::vector<Vertex> perm(g.vertex_count());
    std::iota(perm.begin(), perm.end(), Vertex{0});
    std::map<std::vector<Edge>, std::size_t> counts;
    std::vector<Edge> image;

    // Odometer over the per-cell permutations; each cell starts sorted so
    // next_permutation walks all of its orderings.
    while (true) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            for (std::size_t k = 0; k < cells[c].size(); ++k) perm[cells[c][k]] = images[c][k];
        }
        image.clear();
        for (const auto& e : g.edges()) image.push_back(make_edge(perm[e.u], perm[e.v]));
        std::sort(image.begin(), image.end());
        ++counts[image];

        std::size_t c = 0;
        while (c < cells.size() && !std::next_permutation(images[c].begin(), images[c].end())) ++c;
        if (c == cells.size()) break;
    }
    std::vector<NullClassMember> out;
    out.reserve(counts.size());
    for (auto& [edges, count] : counts) out.push_back({Graph::from_edges(g.vertex_count(), edges), count});
    return out;
}

}  // namespace detail

/// Exact null class. Degree-sequence members have multiplicity 1; for the
/// isomorphism modes multiplicities sum to the group order.
inline std::vector<NullClassMember> enumerate_null_class(const Graph& g_obs, NullClassMode mode,
                                                         const TreatmentAssignment* z_obs = nullptr) {
    if (g_obs.vertex_count() > kMaxEnumerationVertices) {
        throw Error(Errc::TooLargeForEnumeration,
                    "n = " + std::to_string(g_obs.vertex_count()) + " exceeds " +
                        std::to_string(kMaxEnumerationVertices));
    }
    switch (mode) {
        case NullClassMode::DegreeSequence: {
            auto remaining = labelled_degrees(g_obs);
            std::vector<Edge> current;
            std::vector<NullClassMember> out;
            detail::enumerate_degree_class(g_obs.vertex_count(), remaining, 0, current, out);
            return out;
        }
        case NullClassMode::DegreeIsomorphism:
            return detail::enumerate_permutation_images(g_obs, degree_cells(g_obs));
        case NullClassMode::BlockIsomorphism:
            if (z_obs == nullptr) throw Error(Errc::InvalidSpec, "block isomorphism needs a treatment assignment");
            return detail::enumerate_permutation_images(g_obs, degree_treatment_cells(g_obs, *z_obs));
        case NullClassMode::ErdosRenyi:
        case NullClassMode::ErdosRenyiEstimated: break;
    }
    throw Error(Errc::InvalidSpec, "null class '" + std::string(to_string(mode)) + "' is not enumerable");
}

}  // namespace spillover
