#pragma once

// Potential-outcome generators. All three models draw one Normal(0, sd^2)
// baseline per vertex, in vertex order, before looking at the graph; two
// calls with the same RNG state therefore share baselines even when the
// graphs differ.

#include <algorithm>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "spillover/designs.hpp"
#include "spillover/error.hpp"
#include "spillover/graph.hpp"

namespace spillover {

struct OutcomeParams {
    double tau_direct = 0.0;
    double tau_spill = 0.0;
    double beta_deg = 0.0;
    double noise_sd = 1.0;
};

enum class OutcomeModel {
    ProportionDegree,  // direct + spill * treated share + beta * deg / max deg
    Indicator,         // direct + spill * 1(any treated neighbor)
    Proportion,        // ProportionDegree with beta forced to 0
};

constexpr std::string_view to_string(OutcomeModel m) noexcept {
    switch (m) {
        case OutcomeModel::ProportionDegree: return "eq6";
        case OutcomeModel::Indicator: return "s1";
        case OutcomeModel::Proportion: return "s2";
    }
    return "unknown";
}

using OutcomeVector = std::vector<double>;

namespace detail {

template <std::uniform_random_bit_generator Urbg>
OutcomeVector baseline_noise(std::size_t n, double sd, Urbg& rng) {
    if (!(sd > 0.0)) throw Error(Errc::InvalidSpec, "noise_sd must be positive");
    std::normal_distribution<double> noise(0.0, sd);
    OutcomeVector y(n);
    for (auto& v : y) v = noise(rng);
    return y;
}

inline void check_lengths(const Graph& g, const TreatmentAssignment& z) {
    if (z.size() != g.vertex_count()) {
        throw Error(Errc::LengthMismatch, "assignment length " + std::to_string(z.size()) + " vs n = " +
                                              std::to_string(g.vertex_count()));
    }
}

struct ExposureCounts {
    std::vector<std::size_t> degree;
    std::vector<std::size_t> treated_neighbors;
};

inline ExposureCounts exposure_counts(const Graph& g, const TreatmentAssignment& z) {
    ExposureCounts c{std::vector<std::size_t>(g.vertex_count(), 0), std::vector<std::size_t>(g.vertex_count(), 0)};
    for (const auto& e : g.edges()) {
        ++c.degree[e.u];
        ++c.degree[e.v];
        c.treated_neighbors[e.u] += z.z[e.v];
        c.treated_neighbors[e.v] += z.z[e.u];
    }
    return c;
}

}  // namespace detail

template <std::uniform_random_bit_generator Urbg>
OutcomeVector outcome_proportion_degree(const Graph& g, const TreatmentAssignment& z, const OutcomeParams& params,
                                        Urbg& rng) {
    detail::check_lengths(g, z);
    auto y = detail::baseline_noise(g.vertex_count(), params.noise_sd, rng);
    const auto c = detail::exposure_counts(g, z);
    const std::size_t max_deg = c.degree.empty() ? 0 : *std::max_element(c.degree.begin(), c.degree.end());
    if (max_deg == 0 && params.beta_deg != 0.0) {
        throw Error(Errc::DegenerateGraph, "degree term requested on a graph without edges");
    }
    for (Vertex i = 0; i < g.vertex_count(); ++i) {
        y[i] += params.tau_direct * z.z[i];
        if (c.degree[i] > 0) {
            const double share = static_cast<double>(c.treated_neighbors[i]) / static_cast<double>(c.degree[i]);
            y[i] += params.tau_spill * share +
                    params.beta_deg * static_cast<double>(c.degree[i]) / static_cast<double>(max_deg);
        }
    }
    return y;
}

template <std::uniform_random_bit_generator Urbg>
OutcomeVector outcome_indicator(const Graph& g, const TreatmentAssignment& z, const OutcomeParams& params,
                                Urbg& rng) {
    detail::check_lengths(g, z);
    auto y = detail::baseline_noise(g.vertex_count(), params.noise_sd, rng);
    const auto c = detail::exposure_counts(g, z);
    for (Vertex i = 0; i < g.vertex_count(); ++i) {
        y[i] += params.tau_direct * z.z[i] + (c.treated_neighbors[i] > 0 ? params.tau_spill : 0.0);
    }
    return y;
}

template <std::uniform_random_bit_generator Urbg>
OutcomeVector outcome_proportion(const Graph& g, const TreatmentAssignment& z, OutcomeParams params, Urbg& rng) {
    params.beta_deg = 0.0;
    return outcome_proportion_degree(g, z, params, rng);
}

template <std::uniform_random_bit_generator Urbg>
OutcomeVector generate_outcomes(OutcomeModel model, const Graph& g, const TreatmentAssignment& z,
                                const OutcomeParams& params, Urbg& rng) {
    switch (model) {
        case OutcomeModel::ProportionDegree: return outcome_proportion_degree(g, z, params, rng);
        case OutcomeModel::Indicator: return outcome_indicator(g, z, params, rng);
        case OutcomeModel::Proportion: return outcome_proportion(g, z, params, rng);
    }
    throw Error(Errc::InvalidSpec, "unknown outcome model");
}

}  // namespace spillover
