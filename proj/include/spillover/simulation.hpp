#pragma once

// Monte Carlo rejection-rate harness.
//
// A sweep is the product of networks x null classes x beta_deg x tau_spill x
// tau_direct x statistics. Replicate r of every cell draws its graph,
// assignment, noise and null-sampler streams from
// derive_replicate_seed(master_seed, r, tag); cells therefore share common
// random numbers, and all outcome settings and statistics of one
// (network, null class) pair are scored against the same null draws.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "spillover/config.hpp"
#include "spillover/designs.hpp"
#include "spillover/error.hpp"
#include "spillover/graph_models.hpp"
#include "spillover/null_samplers.hpp"
#include "spillover/outcomes.hpp"
#include "spillover/pvalue.hpp"
#include "spillover/random.hpp"

namespace spillover {

/// Replicates whose p-value could not be computed, as a share of R, above
/// which a cell is reported as aborted.
inline constexpr double kMaxFailedReplicateFraction = 0.05;

struct RejectionRow {
    std::string network;
    std::string design;
    std::string outcome;
    double tau_direct = 0.0;
    double tau_spill = 0.0;
    double beta_deg = 0.0;
    std::string stat;
    std::string null_class;
    std::size_t samples = 0;
    double alpha = 0.0;
    std::uint64_t master_seed = 0;
    std::size_t reps = 0;        // declared R
    std::size_t failed = 0;      // replicates without a p-value
    std::size_t rejections = 0;  // p <= alpha; failed replicates never reject
    double rate = 0.0;           // rejections / reps
    double mc_se = 0.0;          // sqrt(rate (1 - rate) / reps)
    std::string status = "ok";   // "ok" or "aborted"
    std::vector<std::optional<double>> p_values;  // per replicate; empty after CSV round trip

    friend bool operator==(const RejectionRow&, const RejectionRow&) = default;
};

struct RejectionRateTable {
    std::string tool_version{kToolVersion};
    Settings config;
    std::vector<RejectionRow> rows;

    friend bool operator==(const RejectionRateTable&, const RejectionRateTable&) = default;
};

template <std::uniform_random_bit_generator Urbg>
Graph generate_network(NetworkKind kind, const NetworkParams& p, Urbg& rng) {
    switch (kind) {
        case NetworkKind::SmallWorld: return gen_small_world(p.small_world, rng);
        case NetworkKind::Sbm: return gen_sbm(p.sbm, rng);
        case NetworkKind::ErGnp: return gen_erdos_renyi_gnp(p.er_n, p.er_p, rng);
        case NetworkKind::ErGnm: return gen_erdos_renyi_gnm(p.er_n, p.er_m, rng);
    }
    throw Error(Errc::InvalidSpec, "unknown network kind");
}

template <std::uniform_random_bit_generator Urbg>
TreatmentAssignment generate_assignment(const DesignSpec& d, const Graph& g, Urbg& rng) {
    if (d.kind == DesignKind::Cre) return assign_completely_randomized(g.vertex_count(), d.n_treated, rng);
    const auto clustering = epsilon_net_clusters(g, d.epsilon);
    return assign_cluster_bernoulli(clustering, g.vertex_count(), d.cluster_p, rng);
}

namespace detail {

struct OutcomeSetting {
    double beta_deg;
    double tau_spill;
    double tau_direct;
};

inline std::vector<OutcomeSetting> outcome_grid(const SimulationConfig& c) {
    std::vector<OutcomeSetting> grid;
    for (double b : c.beta_deg) {
        for (double s : c.tau_spill) {
            for (double d : c.tau_direct) grid.push_back({b, s, d});
        }
    }
    return grid;
}

inline double null_er_p(const SimulationConfig& c, NetworkKind kind) {
    if (c.er_null_p) return *c.er_null_p;
    if (kind == NetworkKind::ErGnp) return c.network.er_p;
    throw Error(Errc::InvalidSpec, "null class 'er' needs er_null_p unless the network is 'er'");
}

/// p-value per (outcome setting, statistic) target; nullopt marks a failure.
inline std::vector<std::optional<double>> run_replicate(const SimulationConfig& c, NetworkKind kind,
                                                        NullClassMode null_class, std::uint64_t replicate) {
    const auto grid = outcome_grid(c);
    const std::size_t n_targets = grid.size() * c.stats.size();
    std::vector<std::optional<double>> p(n_targets);

    Graph g;
    TreatmentAssignment z;
    try {
        auto graph_rng = make_rng(c.master_seed, replicate, StreamTag::Graph);
        g = generate_network(kind, c.network, graph_rng);
        auto assign_rng = make_rng(c.master_seed, replicate, StreamTag::Assignment);
        z = generate_assignment(c.design, g, assign_rng);
    } catch (const Error&) {
        return p;
    }

    std::vector<OutcomeVector> ys(grid.size());
    std::vector<bool> y_ok(grid.size(), true);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        OutcomeParams params{grid[k].tau_direct, grid[k].tau_spill, grid[k].beta_deg, c.noise_sd};
        auto noise_rng = make_rng(c.master_seed, replicate, StreamTag::Noise);
        try {
            ys[k] = generate_outcomes(c.outcome, g, z, params, noise_rng);
        } catch (const Error&) {
            y_ok[k] = false;
        }
    }

    std::vector<PValueTarget> targets;
    std::vector<std::size_t> slot;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!y_ok[k]) continue;
        for (std::size_t s = 0; s < c.stats.size(); ++s) {
            targets.push_back({ys[k], c.stats[s]});
            slot.push_back(k * c.stats.size() + s);
        }
    }
    if (targets.empty()) return p;

    SamplerOptions opts{c.burn_in_mult, c.thin_mult, 0.2};
    if (null_class == NullClassMode::ErdosRenyi) opts.er_p = null_er_p(c, kind);
    auto sampler = make_sampler(null_class, g, &z, opts);
    auto null_rng = make_rng(c.master_seed, replicate, StreamTag::NullSampler);
    const auto outcomes =
        pvalue_mc_batch(g, z, targets, sampler, null_class, c.samples, c.estimator, null_rng, /*keep_draws=*/false);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        if (outcomes[t].report) p[slot[t]] = outcomes[t].report->p_value;
    }
    return p;
}

/// Runs `count` jobs on up to `threads` workers; results land at their index.
template <class Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back([&] {
            while (true) {
                const auto i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next.store(count);
                    return;
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Full sweep. The result does not depend on `threads`.
inline RejectionRateTable run_simulation(const SimulationConfig& c, unsigned threads = 1) {
    c.validate();
    RejectionRateTable table;
    table.config = to_settings(c);
    const auto grid = detail::outcome_grid(c);

    for (const auto kind : c.networks) {
        for (const auto null_class : c.null_classes) {
            std::vector<std::vector<std::optional<double>>> per_rep(c.reps);
            detail::parallel_for(c.reps, threads, [&](std::size_t r) {
                per_rep[r] = detail::run_replicate(c, kind, null_class, r);
            });

            for (std::size_t k = 0; k < grid.size(); ++k) {
                for (std::size_t s = 0; s < c.stats.size(); ++s) {
                    const std::size_t target = k * c.stats.size() + s;
                    RejectionRow row;
                    row.network = std::string(to_string(kind));
                    row.design = std::string(to_string(c.design.kind));
                    row.outcome = std::string(to_string(c.outcome));
                    row.tau_direct = grid[k].tau_direct;
                    row.tau_spill = grid[k].tau_spill;
                    row.beta_deg = grid[k].beta_deg;
                    row.stat = to_string(c.stats[s]);
                    row.null_class = std::string(to_string(null_class));
                    row.samples = c.samples;
                    row.alpha = c.alpha;
                    row.master_seed = c.master_seed;
                    row.reps = c.reps;
                    row.p_values.reserve(c.reps);
                    for (std::size_t r = 0; r < c.reps; ++r) {
                        const auto& p = per_rep[r][target];
                        row.p_values.push_back(p);
                        if (!p) {
                            ++row.failed;
                        } else if (*p <= c.alpha) {
                            ++row.rejections;
                        }
                    }
                    row.rate = static_cast<double>(row.rejections) / static_cast<double>(row.reps);
                    row.mc_se = std::sqrt(row.rate * (1.0 - row.rate) / static_cast<double>(row.reps));
                    if (static_cast<double>(row.failed) > kMaxFailedReplicateFraction * static_cast<double>(row.reps)) {
                        row.status = "aborted";
                    }
                    table.rows.push_back(std::move(row));
                }
            }
        }
    }
    return table;
}

}  // namespace spillover
