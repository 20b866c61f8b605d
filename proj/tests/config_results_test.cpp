#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "spillover/results.hpp"
#include "spillover/simulation.hpp"

using namespace spillover;

namespace {

const std::filesystem::path kConfigs(SPILLOVER_CONFIG_DIR);

/// Cheap settings so a sweep's shape can be checked without its cost.
SimulationConfig shrink(SimulationConfig c) {
    c.reps = 2;
    c.samples = 3;
    c.burn_in_mult = 1;
    c.thin_mult = 1;
    return c;
}

RejectionRateTable sample_table() {
    RejectionRateTable t;
    t.config = to_settings(SimulationConfig{});
    RejectionRow a;
    a.network = "small-world";
    a.design = "cre";
    a.outcome = "eq6";
    a.tau_direct = 4;
    a.tau_spill = 0.4;
    a.beta_deg = 0.1;
    a.stat = "tquant-c";
    a.null_class = "degseq";
    a.samples = 200;
    a.alpha = 0.05;
    a.master_seed = 18446744073709551615ULL;
    a.reps = 3;
    a.failed = 1;
    a.rejections = 1;
    a.rate = 1.0 / 3.0;
    a.mc_se = std::sqrt(a.rate * (1 - a.rate) / 3);
    a.p_values = {0.01, std::nullopt, 0.7};
    RejectionRow b = a;
    b.network = "sbm";
    b.status = "aborted";
    b.rate = 0.1 + 0.2;
    t.rows = {a, b};
    return t;
}

}  // namespace

TEST(Config, DefaultsValidate) { EXPECT_NO_THROW(SimulationConfig{}.validate()); }

TEST(Config, SettingsRoundTrip) {
    SimulationConfig c;
    apply_setting(c, "network", "sbm, er");
    apply_setting(c, "sbm_blocks", "10, 20");
    apply_setting(c, "sbm_pref", "0.3,0.01 ; 0.01,0.2");
    apply_setting(c, "tau_spill", "0, 0.4, 0.7");
    apply_setting(c, "stat", "tbond, tquant-c, ti-t");
    apply_setting(c, "null_class", "degseq, er-hat");
    apply_setting(c, "er_null_p", "0.125");
    apply_setting(c, "alpha", "\"0.1\"");
    apply_setting(c, "seed", "123456789012345");
    const auto s = to_settings(c);
    EXPECT_EQ(to_settings(from_settings(s)), s);
    EXPECT_EQ(s.at("network"), "sbm,er");
    EXPECT_EQ(s.at("sbm_pref"), "0.3,0.01;0.01,0.2");
    EXPECT_EQ(s.at("alpha"), "0.1");
    EXPECT_EQ(s.at("er_null_p"), "0.125");
    apply_setting(c, "er_null_p", "none");
    EXPECT_FALSE(c.er_null_p);
}

TEST(Config, Errors) {
    SimulationConfig c;
    EXPECT_THROW(apply_setting(c, "colour", "blue"), Error);
    EXPECT_THROW(apply_setting(c, "reps", "-3"), Error);
    EXPECT_THROW(apply_setting(c, "alpha", "abc"), Error);
    EXPECT_THROW(apply_setting(c, "network", "lattice"), Error);
    EXPECT_THROW(apply_setting(c, "design", "stepped"), Error);
    std::istringstream bad("network = sbm\njust words\n");
    try {
        read_settings(bad);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2U);
    }
    SimulationConfig zero;
    zero.reps = 0;
    EXPECT_THROW(zero.validate(), Error);
    SimulationConfig odd;
    odd.network.small_world.k = 5;
    EXPECT_THROW(odd.validate(), Error);
}

TEST(Config, ShippedConfigsLoadAndValidate) {
    std::size_t seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(kConfigs)) {
        if (entry.path().extension() != ".cfg") continue;
        const auto c = load_config(entry.path());
        EXPECT_NO_THROW(c.validate()) << entry.path();
        ++seen;
    }
    EXPECT_GE(seen, 4U);
}

TEST(Sweep, TableOneShapeHasSixteenRows) {
    const auto c = shrink(load_config(kConfigs / "table1_cre.cfg"));
    const auto t = run_simulation(c);
    ASSERT_EQ(t.rows.size(), 16U);
    std::set<std::tuple<std::string, double, double, std::string>> keys;
    for (const auto& r : t.rows) keys.insert({r.network, r.tau_direct, r.tau_spill, r.stat});
    EXPECT_EQ(keys.size(), 16U);
}

TEST(Results, EmptyTableIsHeaderOnlyCsv) {
    std::ostringstream out;
    write_csv(RejectionRateTable{}, out);
    EXPECT_EQ(out.str(), std::string(kCsvHeader) + "\n");
}

TEST(Results, CsvRoundTrip) {
    const auto t = sample_table();
    std::stringstream buf;
    write_csv(t, buf);
    const auto back = read_csv(buf);
    ASSERT_EQ(back.rows.size(), t.rows.size());
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        auto expected = t.rows[k];
        expected.p_values.clear();
        EXPECT_EQ(back.rows[k], expected);
    }
}

TEST(Results, JsonRoundTripIsLossless) {
    const auto t = sample_table();
    std::stringstream buf;
    write_json(t, buf);
    const auto back = read_json(buf);
    EXPECT_EQ(back, t);
    EXPECT_EQ(from_settings(back.config).master_seed, SimulationConfig{}.master_seed);
}

TEST(Results, SimulatedTableRoundTrips) {
    auto c = shrink(load_config(kConfigs / "smoke.cfg"));
    const auto t = run_simulation(c);
    std::stringstream json;
    write_json(t, json);
    EXPECT_EQ(read_json(json), t);
    EXPECT_EQ(to_settings(from_settings(t.config)), to_settings(c));
    EXPECT_EQ(t.tool_version, std::string(kToolVersion));
}

TEST(Results, MalformedInputs) {
    std::istringstream wrong_header("a,b,c\n");
    EXPECT_THROW(read_csv(wrong_header), ParseError);
    std::istringstream short_row(std::string(kCsvHeader) + "\nsbm,cre\n");
    try {
        read_csv(short_row);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2U);
    }
    std::istringstream not_json("{ nope");
    EXPECT_THROW(read_json(not_json), ParseError);
    std::istringstream missing_rows(R"({"tool_version":"x","config":{}})");
    EXPECT_THROW(read_json(missing_rows), ParseError);
}

TEST(Results, FormatNames) {
    EXPECT_EQ(parse_result_format("csv"), ResultFormat::Csv);
    EXPECT_EQ(parse_result_format("json"), ResultFormat::Json);
    EXPECT_THROW(parse_result_format("xml"), Error);
}
