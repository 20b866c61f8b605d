#pragma once

// Conditional randomization p-values. The observed outcomes are held fixed
// and the statistic is re-evaluated on null graphs: T(z_obs, G, y_obs). Only
// strict exceedances T(G) > T(G_obs) count; ties are reported separately.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spillover/designs.hpp"
#include "spillover/error.hpp"
#include "spillover/graph.hpp"
#include "spillover/null_samplers.hpp"
#include "spillover/statistics.hpp"

namespace spillover {

enum class Estimator {
    Raw,      // exceed / M_defined
    PlusOne,  // (1 + exceed) / (M_defined + 1)
};

constexpr std::string_view to_string(Estimator e) noexcept { return e == Estimator::Raw ? "raw" : "plus-one"; }

inline Estimator parse_estimator(std::string_view s) {
    if (s == "raw") return Estimator::Raw;
    if (s == "plus-one") return Estimator::PlusOne;
    throw Error(Errc::InvalidSpec, "unknown estimator '" + std::string(s) + "'");
}

/// Share of undefined null draws above which a p-value is refused.
inline constexpr double kMaxUndefinedFraction = 0.10;

struct SeedProvenance {
    std::uint64_t master_seed = 0;
    std::uint64_t replicate = 0;
    std::uint64_t null_stream_seed = 0;
};

struct PValueReport {
    TestStatistic statistic;
    NullClassMode mode = NullClassMode::DegreeSequence;
    Estimator estimator = Estimator::Raw;
    bool exact = false;
    double t_obs = 0.0;
    /// One entry per null draw (Monte Carlo) or per distinct class member (exact).
    std::vector<std::optional<double>> null_draws;
    /// Exact mode only: permutation multiplicity of each class member.
    std::vector<std::size_t> multiplicity;
    double p_value = 0.0;
    std::size_t n_draws = 0;  // M, or the class size weighted by multiplicity
    std::size_t n_exceed = 0;
    std::size_t n_ties = 0;
    std::size_t n_undefined = 0;
    SeedProvenance seed_info;
};

/// Result for one statistic in a batch; exactly one member is set.
struct PValueOutcome {
    std::optional<PValueReport> report;
    std::optional<Error> error;
};

namespace detail {

inline double finish_p_value(std::size_t exceed, std::size_t defined, Estimator est) {
    if (est == Estimator::PlusOne) return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(defined) + 1.0);
    return static_cast<double>(exceed) / static_cast<double>(defined);
}

inline std::optional<Error> degeneracy_error(std::size_t undefined, std::size_t total) {
    if (static_cast<double>(undefined) > kMaxUndefinedFraction * static_cast<double>(total)) {
        return Error(Errc::ExcessiveDegeneracy, std::to_string(undefined) + " of " + std::to_string(total) +
                                                    " null statistics undefined");
    }
    return std::nullopt;
}

}  // namespace detail

/// One (outcome vector, statistic) pair scored against a shared set of null
/// draws. The outcome vector must outlive the call.
struct PValueTarget {
    std::span<const double> y;
    TestStatistic stat;
};

/// Monte Carlo p-values for several targets scored on the same M null draws.
/// Per-target failures are returned, not thrown.
template <std::uniform_random_bit_generator Urbg>
std::vector<PValueOutcome> pvalue_mc_batch(const Graph& g_obs, const TreatmentAssignment& z_obs,
                                           std::span<const PValueTarget> targets, AnySampler& sampler,
                                           NullClassMode mode, std::size_t draws, Estimator estimator, Urbg& rng,
                                           bool keep_draws = true) {
    if (draws < 1) throw Error(Errc::InvalidCount, "need at least one null draw");
    const std::span<const std::uint8_t> z(z_obs.z);
    for (const auto& t : targets) detail::check_stat_lengths(g_obs.vertex_count(), z, t.y);

    ExposureSummary summary;
    summary.compute(g_obs.view(), z);
    std::vector<PValueOutcome> out(targets.size());
    std::vector<bool> active(targets.size(), true);
    for (std::size_t s = 0; s < targets.size(); ++s) {
        const auto t = evaluate(targets[s].stat, summary, z, targets[s].y);
        if (!t) {
            out[s].error = Error(Errc::ObservedStatisticUndefined,
                                 to_string(targets[s].stat) + " undefined on observed data");
            active[s] = false;
            continue;
        }
        PValueReport r;
        r.statistic = targets[s].stat;
        r.mode = mode;
        r.estimator = estimator;
        r.t_obs = *t;
        r.n_draws = draws;
        if (keep_draws) r.null_draws.reserve(draws);
        out[s].report = std::move(r);
    }

    const auto n = g_obs.vertex_count();
    for (std::size_t k = 0; k < draws; ++k) {
        const auto edges = next_draw(sampler, rng);
        summary.compute(EdgeListView{n, edges}, z);
        for (std::size_t s = 0; s < targets.size(); ++s) {
            if (!active[s]) continue;
            auto& r = *out[s].report;
            const auto t = evaluate(targets[s].stat, summary, z, targets[s].y);
            if (keep_draws) r.null_draws.push_back(t);
            if (!t) {
                ++r.n_undefined;
            } else if (*t > r.t_obs) {
                ++r.n_exceed;
            } else if (*t == r.t_obs) {
                ++r.n_ties;
            }
        }
    }

    for (std::size_t s = 0; s < targets.size(); ++s) {
        if (!active[s]) continue;
        auto& r = *out[s].report;
        if (auto err = detail::degeneracy_error(r.n_undefined, draws)) {
            out[s].error = std::move(err);
            out[s].report.reset();
            continue;
        }
        r.p_value = detail::finish_p_value(r.n_exceed, draws - r.n_undefined, estimator);
    }
    return out;
}

/// Monte Carlo p-value for one statistic; failures throw.
template <std::uniform_random_bit_generator Urbg>
PValueReport pvalue_mc(const Graph& g_obs, const TreatmentAssignment& z_obs, std::span<const double> y_obs,
                       const TestStatistic& stat, AnySampler& sampler, NullClassMode mode, std::size_t draws,
                       Estimator estimator, Urbg& rng) {
    const PValueTarget one[] = {{y_obs, stat}};
    auto outcome = pvalue_mc_batch(g_obs, z_obs, one, sampler, mode, draws, estimator, rng);
    if (outcome[0].error) throw *outcome[0].error;
    return std::move(*outcome[0].report);
}

/// Exact p-value over the enumerated null class; members are weighted by
/// their permutation multiplicity.
inline PValueReport pvalue_exact(const Graph& g_obs, const TreatmentAssignment& z_obs, std::span<const double> y_obs,
                                 const TestStatistic& stat, NullClassMode mode) {
    const std::span<const std::uint8_t> z(z_obs.z);
    detail::check_stat_lengths(g_obs.vertex_count(), z, y_obs);
    const auto t_obs = evaluate(stat, g_obs.view(), z, y_obs);
    if (!t_obs) throw Error(Errc::ObservedStatisticUndefined, to_string(stat) + " undefined on observed data");

    const auto members = enumerate_null_class(g_obs, mode, &z_obs);
    PValueReport r;
    r.statistic = stat;
    r.mode = mode;
    r.exact = true;
    r.t_obs = *t_obs;
    for (const auto& m : members) {
        const auto t = evaluate(stat, m.graph.view(), z, y_obs);
        r.null_draws.push_back(t);
        r.multiplicity.push_back(m.multiplicity);
        r.n_draws += m.multiplicity;
        if (!t) {
            r.n_undefined += m.multiplicity;
        } else if (*t > *t_obs) {
            r.n_exceed += m.multiplicity;
        } else if (*t == *t_obs) {
            r.n_ties += m.multiplicity;
        }
    }
    if (auto err = detail::degeneracy_error(r.n_undefined, r.n_draws)) throw *err;
    r.p_value = detail::finish_p_value(r.n_exceed, r.n_draws - r.n_undefined, Estimator::Raw);
    return r;
}

}  // namespace spillover
