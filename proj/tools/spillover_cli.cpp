// spillover: conditional randomization tests for network spillover.
//
//   spillover test        --graph edges.txt --data obs.csv [--stat tbond] [--null-class degseq] ...
//   spillover simulate    [--config sweep.cfg] [--<key> value ...] [--threads T] [--out f] [--format csv|json]
//   spillover cluster     --graph edges.txt [--epsilon 3]
//   spillover sample-null --graph edges.txt [--null-class degseq] [--samples 10] [--data obs.csv]

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spillover/spillover.hpp"

namespace {

using namespace spillover;

/// Opens --out, or falls back to stdout.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw Error(Errc::IoError, "cannot open " + path + " for writing");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
    void finish() {
        stream().flush();
        if (!stream()) throw Error(Errc::IoError, "write failed");
    }

private:
    std::ofstream file_;
};

struct TestArgs {
    std::string graph, data, stat = "tbond", null_class = "degseq", estimator = "raw", out, format = "json";
    std::size_t samples = 1000;
    double alpha = 0.05, burn_in_mult = 100.0, thin_mult = 10.0;
    std::uint64_t seed = 1;
    std::optional<double> er_p;
    bool exact = false;
};

int run_test(const TestArgs& a) {
    SingleTestOptions o;
    o.stat = parse_statistic(a.stat);
    o.null_class = parse_null_class(a.null_class);
    o.samples = a.samples;
    o.estimator = parse_estimator(a.estimator);
    o.alpha = a.alpha;
    o.seed = a.seed;
    o.burn_in_mult = a.burn_in_mult;
    o.thin_mult = a.thin_mult;
    o.er_p = a.er_p;
    o.exact = a.exact;
    const auto report = run_single_test(a.graph, a.data, o);

    Sink sink(a.out);
    if (parse_result_format(a.format) == ResultFormat::Json) {
        sink.stream() << to_json(report, a.alpha).dump(2) << '\n';
    } else {
        sink.stream() << "stat,null_class,estimator,exact,t_obs,p_value,alpha,reject,n_draws,n_exceed,n_ties,"
                         "n_undefined,seed\n"
                      << to_string(report.statistic) << ',' << to_string(report.mode) << ','
                      << to_string(report.estimator) << ',' << (report.exact ? 1 : 0) << ','
                      << format_double(report.t_obs) << ',' << format_double(report.p_value) << ','
                      << format_double(a.alpha) << ',' << (report.p_value <= a.alpha ? 1 : 0) << ','
                      << report.n_draws << ',' << report.n_exceed << ',' << report.n_ties << ','
                      << report.n_undefined << ',' << a.seed << '\n';
    }
    sink.finish();
    return 0;
}

struct SimulateArgs {
    std::string config, out, format = "csv";
    unsigned threads = 1;
    std::vector<std::pair<std::string, std::string>> overrides;
};

int run_simulate(const SimulateArgs& a) {
    SimulationConfig c;
    if (!a.config.empty()) c = load_config(a.config, c);
    for (const auto& [k, v] : a.overrides) apply_setting(c, k, v);
    const auto table = run_simulation(c, a.threads);
    Sink sink(a.out);
    emit_results(table, parse_result_format(a.format), sink.stream());
    sink.finish();
    return 0;
}

struct ClusterArgs {
    std::string graph, out, format = "csv";
    std::size_t epsilon = 3;
};

int run_cluster(const ClusterArgs& a) {
    const Graph g = read_edge_list(a.graph);
    const auto c = epsilon_net_clusters(g, a.epsilon);
    const auto membership = c.membership(g.vertex_count());
    Sink sink(a.out);
    if (parse_result_format(a.format) == ResultFormat::Json) {
        nlohmann::ordered_json j;
        j["epsilon"] = a.epsilon;
        j["centers"] = c.centers;
        j["clusters"] = c.clusters;
        sink.stream() << j.dump(2) << '\n';
    } else {
        sink.stream() << "vertex,cluster,center\n";
        for (Vertex v = 0; v < g.vertex_count(); ++v) {
            sink.stream() << v << ',' << membership[v] << ',' << c.centers[membership[v]] << '\n';
        }
    }
    sink.finish();
    return 0;
}

struct SampleNullArgs {
    std::string graph, data, null_class = "degseq", out, format = "csv";
    std::size_t samples = 10;
    std::uint64_t seed = 1;
    double burn_in_mult = 100.0, thin_mult = 10.0;
    std::optional<double> er_p;
};

int run_sample_null(const SampleNullArgs& a) {
    const Graph g = read_edge_list(a.graph);
    const auto mode = parse_null_class(a.null_class);
    std::optional<ObservedData> data;
    if (!a.data.empty()) data = read_treatment_outcomes(a.data, g.vertex_count());
    if (mode == NullClassMode::BlockIsomorphism && !data) {
        throw Error(Errc::InvalidSpec, "null class 'blockiso' needs --data for the treatment assignment");
    }
    SamplerOptions so{a.burn_in_mult, a.thin_mult, 0.0};
    if (mode == NullClassMode::ErdosRenyi) so.er_p = a.er_p ? *a.er_p : estimate_er_p(g);
    auto sampler = make_sampler(mode, g, data ? &data->z : nullptr, so);
    auto rng = make_rng(a.seed, 0, StreamTag::NullSampler);

    Sink sink(a.out);
    const bool json = parse_result_format(a.format) == ResultFormat::Json;
    nlohmann::ordered_json j;
    if (json) {
        j["null_class"] = a.null_class;
        j["vertex_count"] = g.vertex_count();
        j["seed"] = a.seed;
        j["draws"] = nlohmann::ordered_json::array();
    } else {
        sink.stream() << "draw,u,v\n";
    }
    for (std::size_t k = 0; k < a.samples; ++k) {
        const auto draw = next_draw(sampler, rng);
        std::vector<Edge> edges(draw.begin(), draw.end());
        std::sort(edges.begin(), edges.end());
        if (json) {
            auto arr = nlohmann::ordered_json::array();
            for (const auto& e : edges) arr.push_back({e.u, e.v});
            j["draws"].push_back(std::move(arr));
        } else {
            for (const auto& e : edges) sink.stream() << k << ',' << e.u << ',' << e.v << '\n';
        }
    }
    if (json) sink.stream() << j.dump(2) << '\n';
    sink.finish();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conditional randomization tests for network spillover"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    TestArgs ta;
    auto* test = app.add_subcommand("test", "Test one observed dataset for spillover");
    test->add_option("--graph", ta.graph, "Edge list (first line N, then 'u v' pairs)")->required();
    test->add_option("--data", ta.data, "Treatment/outcome CSV with header id,z,y")->required();
    test->add_option("--stat", ta.stat, "tbond, tquant[-c|-t], ti[-c|-t]")->capture_default_str();
    test->add_option("--null-class", ta.null_class, "degseq, iso, blockiso, er, er-hat")->capture_default_str();
    test->add_option("--samples", ta.samples, "Null draws M")->capture_default_str();
    test->add_option("--estimator", ta.estimator, "raw or plus-one")->capture_default_str();
    test->add_option("--alpha", ta.alpha)->capture_default_str();
    test->add_option("--seed", ta.seed)->capture_default_str();
    test->add_option("--burn-in-mult", ta.burn_in_mult, "Burn-in swaps per edge")->capture_default_str();
    test->add_option("--thin-mult", ta.thin_mult, "Swaps per edge between draws")->capture_default_str();
    test->add_option("--er-p", ta.er_p, "Edge probability for null class 'er' (default: observed density)");
    test->add_flag("--exact", ta.exact, "Enumerate the null class (n <= 10)");
    test->add_option("--out", ta.out, "Output file (default stdout)");
    test->add_option("--format", ta.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo rejection-rate sweep");
    sim->add_option("--config", sa.config, "key = value sweep file");
    sim->add_option("--threads", sa.threads, "Worker threads (results do not depend on it)")->capture_default_str();
    sim->add_option("--out", sa.out, "Output file (default stdout)");
    sim->add_option("--format", sa.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    // Every config key doubles as a flag: sbm_pref -> --sbm-pref. Flags beat the file.
    const SimulationConfig defaults;
    for (const auto& [key, value] : to_settings(defaults)) {
        std::string flag = key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        sim->add_option_function<std::string>(
               "--" + flag, [&sa, key = key](const std::string& v) { sa.overrides.emplace_back(key, v); },
               "default " + value)
            ->type_name("VALUE");
    }

    ClusterArgs ca;
    auto* cl = app.add_subcommand("cluster", "Emit the epsilon-net clustering of a graph");
    cl->add_option("--graph", ca.graph)->required();
    cl->add_option("--epsilon", ca.epsilon)->capture_default_str();
    cl->add_option("--out", ca.out, "Output file (default stdout)");
    cl->add_option("--format", ca.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    SampleNullArgs na;
    auto* sn = app.add_subcommand("sample-null", "Emit null-class draws for inspection");
    sn->add_option("--graph", na.graph)->required();
    sn->add_option("--data", na.data, "Treatment/outcome CSV (needed for blockiso)");
    sn->add_option("--null-class", na.null_class)->capture_default_str();
    sn->add_option("--samples", na.samples)->capture_default_str();
    sn->add_option("--seed", na.seed)->capture_default_str();
    sn->add_option("--burn-in-mult", na.burn_in_mult)->capture_default_str();
    sn->add_option("--thin-mult", na.thin_mult)->capture_default_str();
    sn->add_option("--er-p", na.er_p);
    sn->add_option("--out", na.out, "Output file (default stdout)");
    sn->add_option("--format", na.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*test) return run_test(ta);
        if (*sim) return run_simulate(sa);
        if (*cl) return run_cluster(ca);
        if (*sn) return run_sample_null(na);
    } catch (const ParseError& e) {
        std::cerr << "spillover: " << to_string(e.code()) << " at line " << e.line() << ": " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "spillover: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 2;
    }
    return 1;
}
