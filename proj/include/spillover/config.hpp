#pragma once

// Simulation configuration and its flat key-value text form.
//
//   # comment
//   network    = small-world, sbm
//   design     = cre
//   n_treated  = 300
//   tau_spill  = 0, 0.4
//   sbm_pref   = 0.08,0.01 ; 0.01,0.05      (rows separated by ';')
//
// Values may be wrapped in double quotes. Every key can also be set from the
// command line; later assignments win.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "spillover/designs.hpp"
#include "spillover/error.hpp"
#include "spillover/graph_io.hpp"
#include "spillover/graph_models.hpp"
#include "spillover/null_samplers.hpp"
#include "spillover/outcomes.hpp"
#include "spillover/pvalue.hpp"
#include "spillover/statistics.hpp"

namespace spillover {

inline constexpr std::string_view kToolVersion = "0.1.0";

using Settings = std::map<std::string, std::string>;

enum class NetworkKind { SmallWorld, Sbm, ErGnp, ErGnm };

constexpr std::string_view to_string(NetworkKind k) noexcept {
    switch (k) {
        case NetworkKind::SmallWorld: return "small-world";
        case NetworkKind::Sbm: return "sbm";
        case NetworkKind::ErGnp: return "er";
        case NetworkKind::ErGnm: return "er-gnm";
    }
    return "unknown";
}

enum class DesignKind { Cre, Cluster };

constexpr std::string_view to_string(DesignKind k) noexcept { return k == DesignKind::Cre ? "cre" : "cluster"; }

struct NetworkParams {
    SmallWorldSpec small_world;
    SbmSpec sbm = SbmSpec::reference();
    std::size_t er_n = 100;
    double er_p = 0.2;
    std::size_t er_m = 990;
};

struct DesignSpec {
    DesignKind kind = DesignKind::Cre;
    std::size_t n_treated = 300;
    std::size_t epsilon = 3;
    double cluster_p = 0.5;
};

struct SimulationConfig {
    std::vector<NetworkKind> networks = {NetworkKind::SmallWorld};
    NetworkParams network;
    DesignSpec design;
    OutcomeModel outcome = OutcomeModel::ProportionDegree;
    std::vector<double> tau_direct = {0.0};
    std::vector<double> tau_spill = {0.0};
    std::vector<double> beta_deg = {0.0};
    double noise_sd = 1.0;
    std::vector<TestStatistic> stats = {TestStatistic{StatKind::BondEdgeContrast, Arm::Weighted}};
    std::vector<NullClassMode> null_classes = {NullClassMode::DegreeSequence};
    std::size_t samples = 200;
    std::size_t reps = 500;
    double alpha = 0.05;
    Estimator estimator = Estimator::Raw;
    std::uint64_t master_seed = 1;
    double burn_in_mult = 100.0;
    double thin_mult = 10.0;
    std::optional<double> er_null_p;

    void validate() const {
        if (networks.empty()) throw Error(Errc::InvalidSpec, "no network selected");
        if (stats.empty()) throw Error(Errc::InvalidSpec, "no statistic selected");
        if (null_classes.empty()) throw Error(Errc::InvalidSpec, "no null class selected");
        if (tau_direct.empty() || tau_spill.empty() || beta_deg.empty()) {
            throw Error(Errc::InvalidSpec, "empty effect list");
        }
        if (reps < 1) throw Error(Errc::InvalidSpec, "reps must be >= 1");
        if (samples < 1) throw Error(Errc::InvalidSpec, "samples must be >= 1");
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(Errc::InvalidProbability, "alpha outside [0,1]");
        if (!(noise_sd > 0.0)) throw Error(Errc::InvalidSpec, "noise_sd must be positive");
        if (!(design.cluster_p >= 0.0 && design.cluster_p <= 1.0)) {
            throw Error(Errc::InvalidProbability, "cluster_p outside [0,1]");
        }
        if (burn_in_mult < 0.0 || thin_mult < 0.0) throw Error(Errc::InvalidSpec, "negative swap multiplier");
        for (auto k : networks) {
            switch (k) {
                case NetworkKind::SmallWorld: network.small_world.validate(); break;
                case NetworkKind::Sbm: network.sbm.validate(); break;
                case NetworkKind::ErGnp: detail::check_probability(network.er_p); break;
                case NetworkKind::ErGnm:
                    if (network.er_m > detail::pair_count(network.er_n)) {
                        throw Error(Errc::TooManyEdges, "er_m exceeds C(er_n, 2)");
                    }
                    break;
            }
        }
        if (er_null_p) detail::check_probability(*er_null_p);
    }
};

// ---------------------------------------------------------------------------
// Value formatting and parsing.

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw Error(Errc::InvalidSpec, "cannot format number");
    return {buf, ptr};
}

namespace detail {

inline std::string_view unquote(std::string_view v) {
    v = trim(v);
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    return trim(v);
}

inline std::vector<std::string_view> split_on(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view key, std::string_view text) {
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw Error(Errc::InvalidSpec, std::string(key) + ": not a number '" + std::string(text) + "'");
    }
    return v;
}

template <class Int>
Int parse_count(std::string_view key, std::string_view text) {
    Int v = 0;
    if (!parse_integer(text, v)) {
        throw Error(Errc::InvalidSpec, std::string(key) + ": not a non-negative integer '" + std::string(text) + "'");
    }
    return v;
}

inline std::vector<double> parse_double_list(std::string_view key, std::string_view text) {
    std::vector<double> out;
    for (auto item : split_on(text, ',')) out.push_back(parse_double(key, item));
    return out;
}

template <class T>
std::string join(const std::vector<T>& items, auto&& fmt, std::string_view sep = ",") {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += sep;
        out += fmt(items[i]);
    }
    return out;
}

inline NetworkKind parse_network(std::string_view s) {
    for (auto k : {NetworkKind::SmallWorld, NetworkKind::Sbm, NetworkKind::ErGnp, NetworkKind::ErGnm}) {
        if (to_string(k) == s) return k;
    }
    throw Error(Errc::InvalidSpec, "unknown network '" + std::string(s) + "'");
}

inline OutcomeModel parse_outcome(std::string_view s) {
    for (auto m : {OutcomeModel::ProportionDegree, OutcomeModel::Indicator, OutcomeModel::Proportion}) {
        if (to_string(m) == s) return m;
    }
    throw Error(Errc::InvalidSpec, "unknown outcome model '" + std::string(s) + "'");
}

}  // namespace detail

/// Applies one key = value assignment.
inline void apply_setting(SimulationConfig& c, std::string_view key, std::string_view raw) {
    using namespace detail;
    const auto value = unquote(raw);
    if (key == "network") {
        c.networks.clear();
        for (auto item : split_on(value, ',')) c.networks.push_back(parse_network(item));
    } else if (key == "sw_n") {
        c.network.small_world.n = parse_count<std::size_t>(key, value);
    } else if (key == "sw_k") {
        c.network.small_world.k = parse_count<std::size_t>(key, value);
    } else if (key == "sw_p_rw") {
        c.network.small_world.p_rewire = parse_double(key, value);
    } else if (key == "sbm_blocks") {
        c.network.sbm.block_sizes.clear();
        for (auto item : split_on(value, ',')) c.network.sbm.block_sizes.push_back(parse_count<std::size_t>(key, item));
    } else if (key == "sbm_pref") {
        c.network.sbm.pref.clear();
        for (auto row : split_on(value, ';')) c.network.sbm.pref.push_back(parse_double_list(key, row));
    } else if (key == "er_n") {
        c.network.er_n = parse_count<std::size_t>(key, value);
    } else if (key == "er_p") {
        c.network.er_p = parse_double(key, value);
    } else if (key == "er_m") {
        c.network.er_m = parse_count<std::size_t>(key, value);
    } else if (key == "design") {
        if (value == "cre") {
            c.design.kind = DesignKind::Cre;
        } else if (value == "cluster") {
            c.design.kind = DesignKind::Cluster;
        } else {
            throw Error(Errc::InvalidSpec, "unknown design '" + std::string(value) + "'");
        }
    } else if (key == "n_treated") {
        c.design.n_treated = parse_count<std::size_t>(key, value);
    } else if (key == "epsilon") {
        c.design.epsilon = parse_count<std::size_t>(key, value);
    } else if (key == "cluster_p") {
        c.design.cluster_p = parse_double(key, value);
    } else if (key == "outcome") {
        c.outcome = parse_outcome(value);
    } else if (key == "tau_direct") {
        c.tau_direct = parse_double_list(key, value);
    } else if (key == "tau_spill") {
        c.tau_spill = parse_double_list(key, value);
    } else if (key == "beta_deg") {
        c.beta_deg = parse_double_list(key, value);
    } else if (key == "noise_sd") {
        c.noise_sd = parse_double(key, value);
    } else if (key == "stat") {
        c.stats.clear();
        for (auto item : split_on(value, ',')) c.stats.push_back(parse_statistic(item));
    } else if (key == "null_class") {
        c.null_classes.clear();
        for (auto item : split_on(value, ',')) c.null_classes.push_back(parse_null_class(item));
    } else if (key == "samples") {
        c.samples = parse_count<std::size_t>(key, value);
    } else if (key == "reps") {
        c.reps = parse_count<std::size_t>(key, value);
    } else if (key == "alpha") {
        c.alpha = parse_double(key, value);
    } else if (key == "estimator") {
        c.estimator = parse_estimator(value);
    } else if (key == "seed") {
        c.master_seed = parse_count<std::uint64_t>(key, value);
    } else if (key == "burn_in_mult") {
        c.burn_in_mult = parse_double(key, value);
    } else if (key == "thin_mult") {
        c.thin_mult = parse_double(key, value);
    } else if (key == "er_null_p") {
        if (value.empty() || value == "none") {
            c.er_null_p.reset();
        } else {
            c.er_null_p = parse_double(key, value);
        }
    } else {
        throw Error(Errc::InvalidSpec, "unknown config key '" + std::string(key) + "'");
    }
}

/// Canonical echo of every key; from_settings(to_settings(c)) reproduces c.
inline Settings to_settings(const SimulationConfig& c) {
    using detail::join;
    auto num = [](double v) { return format_double(v); };
    auto cnt = [](auto v) { return std::to_string(v); };
    Settings s;
    s["network"] = join(c.networks, [](NetworkKind k) { return std::string(to_string(k)); });
    s["sw_n"] = cnt(c.network.small_world.n);
    s["sw_k"] = cnt(c.network.small_world.k);
    s["sw_p_rw"] = num(c.network.small_world.p_rewire);
    s["sbm_blocks"] = join(c.network.sbm.block_sizes, cnt);
    s["sbm_pref"] = join(c.network.sbm.pref, [&](const std::vector<double>& row) { return join(row, num); }, ";");
    s["er_n"] = cnt(c.network.er_n);
    s["er_p"] = num(c.network.er_p);
    s["er_m"] = cnt(c.network.er_m);
    s["design"] = std::string(to_string(c.design.kind));
    s["n_treated"] = cnt(c.design.n_treated);
    s["epsilon"] = cnt(c.design.epsilon);
    s["cluster_p"] = num(c.design.cluster_p);
    s["outcome"] = std::string(to_string(c.outcome));
    s["tau_direct"] = join(c.tau_direct, num);
    s["tau_spill"] = join(c.tau_spill, num);
    s["beta_deg"] = join(c.beta_deg, num);
    s["noise_sd"] = num(c.noise_sd);
    s["stat"] = join(c.stats, [](const TestStatistic& t) { return to_string(t); });
    s["null_class"] = join(c.null_classes, [](NullClassMode m) { return std::string(to_string(m)); });
    s["samples"] = cnt(c.samples);
    s["reps"] = cnt(c.reps);
    s["alpha"] = num(c.alpha);
    s["estimator"] = std::string(to_string(c.estimator));
    s["seed"] = cnt(c.master_seed);
    s["burn_in_mult"] = num(c.burn_in_mult);
    s["thin_mult"] = num(c.thin_mult);
    s["er_null_p"] = c.er_null_p ? num(*c.er_null_p) : "none";
    return s;
}

inline SimulationConfig from_settings(const Settings& s, SimulationConfig base = {}) {
    for (const auto& [k, v] : s) apply_setting(base, k, v);
    return base;
}

/// Reads `key = value` lines (order preserved, later keys win when applied).
inline std::vector<std::pair<std::string, std::string>> read_settings(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = detail::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const auto key = detail::trim(body.substr(0, eq));
        if (key.empty()) throw ParseError(line_no, "empty key");
        out.emplace_back(std::string(key), std::string(detail::trim(body.substr(eq + 1))));
    }
    return out;
}

inline SimulationConfig load_config(const std::filesystem::path& path, SimulationConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    for (const auto& [k, v] : read_settings(in)) apply_setting(base, k, v);
    return base;
}

}  // namespace spillover
