#pragma once

// Serialization of rejection-rate tables (CSV and JSON) and p-value reports
// (JSON).

#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spillover/config.hpp"
#include "spillover/error.hpp"
#include "spillover/pvalue.hpp"
#include "spillover/simulation.hpp"

namespace spillover {

enum class ResultFormat { Csv, Json };

inline ResultFormat parse_result_format(std::string_view s) {
    if (s == "csv") return ResultFormat::Csv;
    if (s == "json") return ResultFormat::Json;
    throw Error(Errc::InvalidSpec, "unknown format '" + std::string(s) + "'");
}

inline constexpr std::string_view kCsvHeader =
    "network,design,outcome,tau_direct,tau_spill,beta_deg,stat,null_class,samples,alpha,master_seed,"
    "reps,failed,rejections,rate,mc_se,status";

/// Header plus one line per row. Config echo and p-value vectors are JSON-only.
inline void write_csv(const RejectionRateTable& t, std::ostream& out) {
    out << kCsvHeader << '\n';
    for (const auto& r : t.rows) {
        out << r.network << ',' << r.design << ',' << r.outcome << ',' << format_double(r.tau_direct) << ','
            << format_double(r.tau_spill) << ',' << format_double(r.beta_deg) << ',' << r.stat << ','
            << r.null_class << ',' << r.samples << ',' << format_double(r.alpha) << ',' << r.master_seed << ','
            << r.reps << ',' << r.failed << ',' << r.rejections << ',' << format_double(r.rate) << ','
            << format_double(r.mc_se) << ',' << r.status << '\n';
    }
}

inline RejectionRateTable read_csv(std::istream& in) {
    RejectionRateTable t;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line) || detail::trim(line) != kCsvHeader) throw ParseError(1, "unexpected CSV header");
    ++line_no;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto f = detail::split_on(line, ',');
        if (f.size() != 17) throw ParseError(line_no, "expected 17 fields");
        try {
            RejectionRow r;
            r.network = f[0];
            r.design = f[1];
            r.outcome = f[2];
            r.tau_direct = detail::parse_double("tau_direct", f[3]);
            r.tau_spill = detail::parse_double("tau_spill", f[4]);
            r.beta_deg = detail::parse_double("beta_deg", f[5]);
            r.stat = f[6];
            r.null_class = f[7];
            r.samples = detail::parse_count<std::size_t>("samples", f[8]);
            r.alpha = detail::parse_double("alpha", f[9]);
            r.master_seed = detail::parse_count<std::uint64_t>("master_seed", f[10]);
            r.reps = detail::parse_count<std::size_t>("reps", f[11]);
            r.failed = detail::parse_count<std::size_t>("failed", f[12]);
            r.rejections = detail::parse_count<std::size_t>("rejections", f[13]);
            r.rate = detail::parse_double("rate", f[14]);
            r.mc_se = detail::parse_double("mc_se", f[15]);
            r.status = f[16];
            t.rows.push_back(std::move(r));
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return t;
}

namespace detail {

inline nlohmann::ordered_json optional_array(const std::vector<std::optional<double>>& values) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& v : values) {
        if (v) {
            arr.push_back(*v);
        } else {
            arr.push_back(nullptr);
        }
    }
    return arr;
}

inline std::vector<std::optional<double>> optional_vector(const nlohmann::ordered_json& arr) {
    std::vector<std::optional<double>> out;
    for (const auto& v : arr) {
        if (v.is_null()) {
            out.emplace_back(std::nullopt);
        } else {
            out.emplace_back(v.get<double>());
        }
    }
    return out;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const RejectionRateTable& t) {
    nlohmann::ordered_json j;
    j["tool"] = "spillover";
    j["tool_version"] = t.tool_version;
    j["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.config) j["config"][k] = v;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
        nlohmann::ordered_json row;
        row["network"] = r.network;
        row["design"] = r.design;
        row["outcome"] = r.outcome;
        row["tau_direct"] = r.tau_direct;
        row["tau_spill"] = r.tau_spill;
        row["beta_deg"] = r.beta_deg;
        row["stat"] = r.stat;
        row["null_class"] = r.null_class;
        row["samples"] = r.samples;
        row["alpha"] = r.alpha;
        row["master_seed"] = r.master_seed;
        row["reps"] = r.reps;
        row["failed"] = r.failed;
        row["rejections"] = r.rejections;
        row["rate"] = r.rate;
        row["mc_se"] = r.mc_se;
        row["status"] = r.status;
        row["p_values"] = detail::optional_array(r.p_values);
        j["rows"].push_back(std::move(row));
    }
    return j;
}

inline RejectionRateTable table_from_json(const nlohmann::ordered_json& j) {
    try {
        RejectionRateTable t;
        t.tool_version = j.at("tool_version").get<std::string>();
        for (const auto& [k, v] : j.at("config").items()) t.config[k] = v.get<std::string>();
        for (const auto& row : j.at("rows")) {
            RejectionRow r;
            r.network = row.at("network").get<std::string>();
            r.design = row.at("design").get<std::string>();
            r.outcome = row.at("outcome").get<std::string>();
            r.tau_direct = row.at("tau_direct").get<double>();
            r.tau_spill = row.at("tau_spill").get<double>();
            r.beta_deg = row.at("beta_deg").get<double>();
            r.stat = row.at("stat").get<std::string>();
            r.null_class = row.at("null_class").get<std::string>();
            r.samples = row.at("samples").get<std::size_t>();
            r.alpha = row.at("alpha").get<double>();
            r.master_seed = row.at("master_seed").get<std::uint64_t>();
            r.reps = row.at("reps").get<std::size_t>();
            r.failed = row.at("failed").get<std::size_t>();
            r.rejections = row.at("rejections").get<std::size_t>();
            r.rate = row.at("rate").get<double>();
            r.mc_se = row.at("mc_se").get<double>();
            r.status = row.at("status").get<std::string>();
            r.p_values = detail::optional_vector(row.at("p_values"));
            t.rows.push_back(std::move(r));
        }
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("malformed result JSON: ") + e.what());
    }
}

inline void write_json(const RejectionRateTable& t, std::ostream& out) { out << to_json(t).dump(2) << '\n'; }

inline RejectionRateTable read_json(std::istream& in) {
    try {
        return table_from_json(nlohmann::ordered_json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(0, e.what());
    }
}

inline void emit_results(const RejectionRateTable& t, ResultFormat format, std::ostream& out) {
    if (format == ResultFormat::Csv) {
        write_csv(t, out);
    } else {
        write_json(t, out);
    }
}

inline void emit_results(const RejectionRateTable& t, ResultFormat format, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
    emit_results(t, format, out);
    out.flush();
    if (!out) throw Error(Errc::IoError, "write failed: " + path.string());
}

inline nlohmann::ordered_json to_json(const PValueReport& r, double alpha) {
    nlohmann::ordered_json j;
    j["tool"] = "spillover";
    j["tool_version"] = std::string(kToolVersion);
    j["statistic"] = to_string(r.statistic);
    j["null_class"] = std::string(to_string(r.mode));
    j["estimator"] = std::string(to_string(r.estimator));
    j["exact"] = r.exact;
    j["t_obs"] = r.t_obs;
    j["p_value"] = r.p_value;
    j["alpha"] = alpha;
    j["reject"] = r.p_value <= alpha;
    j["n_draws"] = r.n_draws;
    j["n_exceed"] = r.n_exceed;
    j["n_ties"] = r.n_ties;
    j["n_undefined"] = r.n_undefined;
    j["seed_info"] = {{"master_seed", r.seed_info.master_seed},
                      {"replicate", r.seed_info.replicate},
                      {"stream", std::string(to_string(StreamTag::NullSampler))},
                      {"null_stream_seed", r.seed_info.null_stream_seed}};
    j["null_draws"] = detail::optional_array(r.null_draws);
    if (!r.multiplicity.empty()) j["multiplicity"] = r.multiplicity;
    return j;
}

}  // namespace spillover
