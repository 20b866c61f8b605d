#pragma once

// Spillover test statistics. Each is a function of (graph, z, y) and is
// undefined (std::nullopt) when a group it averages over is empty.
//
// Every statistic here depends on the graph only through two per-vertex
// counts, the degree and the number of treated neighbors, so a null draw is
// scored by one pass over its edges followed by O(n) work.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spillover/error.hpp"
#include "spillover/graph.hpp"

namespace spillover {

enum class StatKind { HasTreatedNeighbor, QuantContrast, BondEdgeContrast };
enum class Arm { Control, Treated, Weighted };

struct TestStatistic {
    StatKind kind = StatKind::BondEdgeContrast;
    Arm arm = Arm::Weighted;  // ignored by BondEdgeContrast

    friend bool operator==(const TestStatistic&, const TestStatistic&) = default;
};

inline std::string to_string(const TestStatistic& s) {
    auto suffix = [&] {
        switch (s.arm) {
            case Arm::Control: return std::string("-c");
            case Arm::Treated: return std::string("-t");
            case Arm::Weighted: return std::string();
        }
        return std::string();
    };
    switch (s.kind) {
        case StatKind::HasTreatedNeighbor: return "ti" + suffix();
        case StatKind::QuantContrast: return "tquant" + suffix();
        case StatKind::BondEdgeContrast: return "tbond";
    }
    return "unknown";
}

/// Accepts tbond, ti, ti-c, ti-t, tquant, tquant-c, tquant-t.
inline TestStatistic parse_statistic(std::string_view name) {
    auto arm_of = [&](std::string_view rest) {
        if (rest.empty()) return Arm::Weighted;
        if (rest == "-c") return Arm::Control;
        if (rest == "-t") return Arm::Treated;
        throw Error(Errc::InvalidSpec, "unknown statistic '" + std::string(name) + "'");
    };
    if (name == "tbond") return {StatKind::BondEdgeContrast, Arm::Weighted};
    if (name.starts_with("tquant")) return {StatKind::QuantContrast, arm_of(name.substr(6))};
    if (name.starts_with("ti")) return {StatKind::HasTreatedNeighbor, arm_of(name.substr(2))};
    throw Error(Errc::InvalidSpec, "unknown statistic '" + std::string(name) + "'");
}

/// Nearest-rank quantile: the ceil(q*m)-th smallest of m values.
inline double quantile_nearest_rank(std::span<const double> values, double q) {
    if (values.empty()) throw Error(Errc::EmptyInput, "quantile of empty input");
    if (!(q > 0.0 && q < 1.0)) throw Error(Errc::InvalidProbability, "quantile level outside (0,1)");
    const auto m = values.size();
    // The small slack keeps q*m that is integral in exact arithmetic from
    // rounding up past its true rank.
    const double raw = q * static_cast<double>(m);
    auto rank = static_cast<std::size_t>(std::ceil(raw - 1e-9 * raw));
    rank = std::clamp<std::size_t>(rank, 1, m);
    std::vector<double> copy(values.begin(), values.end());
    std::nth_element(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(rank - 1), copy.end());
    return copy[rank - 1];
}

/// Degree and treated-neighbor count per vertex.
struct ExposureSummary {
    std::vector<std::uint32_t> degree;
    std::vector<std::uint32_t> treated_neighbors;

    void compute(EdgeListView g, std::span<const std::uint8_t> z) {
        degree.assign(g.vertex_count, 0);
        treated_neighbors.assign(g.vertex_count, 0);
        for (const auto& e : g.edges) {
            ++degree[e.u];
            ++degree[e.v];
            treated_neighbors[e.u] += z[e.v];
            treated_neighbors[e.v] += z[e.u];
        }
    }
};

namespace detail {

inline std::optional<double> combine_arms(std::optional<double> control, std::optional<double> treated,
                                          std::span<const std::uint8_t> z) {
    if (!control || !treated) return std::nullopt;
    const auto n = static_cast<double>(z.size());
    double n_t = 0;
    for (auto v : z) n_t += v;
    return (n - n_t) / n * *control + n_t / n * *treated;
}

inline std::optional<double> has_treated_neighbor_arm(const ExposureSummary& s, std::span<const std::uint8_t> z,
                                                      std::span<const double> y, std::uint8_t arm) {
    double sum_exposed = 0.0;
    double sum_unexposed = 0.0;
    std::size_t n_exposed = 0;
    std::size_t n_unexposed = 0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] != arm) continue;
        if (s.treated_neighbors[i] > 0) {
            sum_exposed += y[i];
            ++n_exposed;
        } else {
            sum_unexposed += y[i];
            ++n_unexposed;
        }
    }
    if (n_exposed == 0 || n_unexposed == 0) return std::nullopt;
    return sum_exposed / static_cast<double>(n_exposed) - sum_unexposed / static_cast<double>(n_unexposed);
}

inline std::optional<double> quant_arm(const ExposureSummary& s, std::span<const std::uint8_t> z,
                                       std::span<const double> y, std::uint8_t arm) {
    std::vector<double> share;
    std::vector<std::size_t> who;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] != arm || s.degree[i] == 0) continue;
        share.push_back(static_cast<double>(s.treated_neighbors[i]) / static_cast<double>(s.degree[i]));
        who.push_back(i);
    }
    if (share.empty()) return std::nullopt;
    const double lo = quantile_nearest_rank(share, 0.25);
    const double hi = quantile_nearest_rank(share, 0.75);
    double sum_hi = 0.0;
    double sum_lo = 0.0;
    std::size_t n_hi = 0;
    std::size_t n_lo = 0;
    for (std::size_t k = 0; k < share.size(); ++k) {
        if (share[k] >= hi) {
            sum_hi += y[who[k]];
            ++n_hi;
        }
        if (share[k] <= lo) {
            sum_lo += y[who[k]];
            ++n_lo;
        }
    }
    if (n_hi == 0 || n_lo == 0) return std::nullopt;
    return sum_hi / static_cast<double>(n_hi) - sum_lo / static_cast<double>(n_lo);
}

inline void check_stat_lengths(std::size_t n, std::span<const std::uint8_t> z, std::span<const double> y) {
    if (z.size() != n || y.size() != n) {
        throw Error(Errc::LengthMismatch, "z/y lengths " + std::to_string(z.size()) + "/" +
                                              std::to_string(y.size()) + " vs n = " + std::to_string(n));
    }
}

}  // namespace detail

inline std::optional<double> t_has_treated_neighbor(const ExposureSummary& s, std::span<const std::uint8_t> z,
                                                    std::span<const double> y, Arm arm) {
    switch (arm) {
        case Arm::Control: return detail::has_treated_neighbor_arm(s, z, y, 0);
        case Arm::Treated: return detail::has_treated_neighbor_arm(s, z, y, 1);
        case Arm::Weighted:
            return detail::combine_arms(detail::has_treated_neighbor_arm(s, z, y, 0),
                                        detail::has_treated_neighbor_arm(s, z, y, 1), z);
    }
    return std::nullopt;
}

/// Isolated vertices carry no treated share and are left out of both
/// quartile groups.
inline std::optional<double> t_quant(const ExposureSummary& s, std::span<const std::uint8_t> z,
                                     std::span<const double> y, Arm arm) {
    switch (arm) {
        case Arm::Control: return detail::quant_arm(s, z, y, 0);
        case Arm::Treated: return detail::quant_arm(s, z, y, 1);
        case Arm::Weighted:
            return detail::combine_arms(detail::quant_arm(s, z, y, 0), detail::quant_arm(s, z, y, 1), z);
    }
    return std::nullopt;
}

/// Mean outcome over ordered adjacent pairs (i, j) with j treated, minus the
/// same with j in control.
inline std::optional<double> t_bond(const ExposureSummary& s, std::span<const double> y) {
    double num_t = 0.0;
    double num_c = 0.0;
    std::uint64_t den_t = 0;
    std::uint64_t den_c = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const auto t = s.treated_neighbors[i];
        const auto c = s.degree[i] - t;
        num_t += y[i] * t;
        num_c += y[i] * c;
        den_t += t;
        den_c += c;
    }
    if (den_t == 0 || den_c == 0) return std::nullopt;
    return num_t / static_cast<double>(den_t) - num_c / static_cast<double>(den_c);
}

inline std::optional<double> evaluate(const TestStatistic& stat, const ExposureSummary& s,
                                      std::span<const std::uint8_t> z, std::span<const double> y) {
    switch (stat.kind) {
        case StatKind::HasTreatedNeighbor: return t_has_treated_neighbor(s, z, y, stat.arm);
        case StatKind::QuantContrast: return t_quant(s, z, y, stat.arm);
        case StatKind::BondEdgeContrast: return t_bond(s, y);
    }
    return std::nullopt;
}

/// Convenience entry point: T(z, g, y) for one graph.
inline std::optional<double> evaluate(const TestStatistic& stat, EdgeListView g, std::span<const std::uint8_t> z,
                                      std::span<const double> y) {
    detail::check_stat_lengths(g.vertex_count, z, y);
    ExposureSummary s;
    s.compute(g, z);
    return evaluate(stat, s, z, y);
}

inline std::optional<double> evaluate(const TestStatistic& stat, const Graph& g, std::span<const std::uint8_t> z,
                                      std::span<const double> y) {
    return evaluate(stat, g.view(), z, y);
}

}  // namespace spillover
