#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "json.hpp"

#include "condmix/errors.hpp"
#include "condmix/exp/experiments.hpp"
#include "condmix/io/csv.hpp"

using namespace condmix;

namespace {

RunConfig tiny_mix_config() {
    RunConfig cfg = default_config("lozi-cond-mix");
    cfg.replicas = 2;
    cfg.samples = 2000;
    cfg.n_max = 3;
    cfg.n_init = 200;
    return cfg;
}

double column_sum(const Table& tbl, std::size_t col) {
    double s = 0.0;
    for (const auto& row : tbl.rows) s += std::stod(row.at(col));
    return s;
}

}  // namespace

TEST(Config, PerExperimentDefaults) {
    EXPECT_DOUBLE_EQ(default_config("lozi-cond-mix").a, 1.8);
    EXPECT_DOUBLE_EQ(default_config("lozi-cond-mix").b, 0.35);
    const RunConfig hist = default_config("lozi-cond-hist");
    EXPECT_DOUBLE_EQ(hist.a, 1.7);
    EXPECT_DOUBLE_EQ(hist.b, 0.5);
    EXPECT_EQ(hist.samples, 200000u);
    const RunConfig cov = default_config("lozi-covering");
    EXPECT_EQ(cov.n_max, 20u);
    EXPECT_EQ(cov.samples, 20000u);
    EXPECT_EQ(default_config("baker-fourier").samples, 1000000u);
    EXPECT_EQ(default_config("bayes-forecast").n_max, 18u);
    EXPECT_THROW(default_config("nope"), ConfigError);
}

TEST(Config, OverlayAndFieldErrors) {
    using nlohmann::json;
    const RunConfig cfg =
        parse_config("lozi-cond-mix", json{{"seed", 7}, {"replicas", 4}, {"a", 1.75}});
    EXPECT_EQ(cfg.seed, 7u);
    EXPECT_EQ(cfg.replicas, 4u);
    EXPECT_DOUBLE_EQ(cfg.a, 1.75);
    EXPECT_DOUBLE_EQ(cfg.b, 0.35);  // untouched default

    // Errors must name the offending key so a bad run dies loudly and early.
    try {
        parse_config("lozi-cond-mix", json{{"bin_width", 0.01}});
        FAIL() << "hist-only key accepted by mix";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("bin_width"), std::string::npos);
    }
    try {
        parse_config("lozi-cond-mix", json{{"seed", "abc"}});
        FAIL() << "ill-typed seed accepted";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("seed"), std::string::npos);
    }
    EXPECT_THROW(parse_config("lozi-cond-mix", json{{"replicas", 1}}), ConfigError);
    EXPECT_THROW(parse_config("lozi-cond-mix", json{{"seed", 12.5}}), ConfigError);
    EXPECT_THROW(parse_config("lozi-cond-mix", json::array()), ConfigError);
    EXPECT_THROW(parse_config("baker-mix", json{{"mu", 1.5}}), ConfigError);
    // Integral-valued floats are fine: JSON has one number type.
    EXPECT_EQ(parse_config("lozi-cond-mix", json{{"samples", 5000.0}}).samples, 5000u);
}

TEST(Config, ValidateCrossField) {
    RunConfig cfg = default_config("baker-mix");
    cfg.k = 3;  // offsets still has 2 entries
    EXPECT_THROW(validate_config(cfg), ConfigError);
    cfg.offsets = {0.0, 0.34, 0.67};
    EXPECT_NO_THROW(validate_config(cfg));
}

TEST(Config, JsonEchoRoundTrip) {
    const RunConfig cfg = parse_config("lozi-cond-hist", nlohmann::json{{"bin_width", 0.005}});
    const nlohmann::ordered_json j = config_json(cfg);
    EXPECT_EQ(j.at("experiment"), "lozi-cond-hist");
    EXPECT_DOUBLE_EQ(j.at("bin_width").get<double>(), 0.005);
    EXPECT_DOUBLE_EQ(j.at("a").get<double>(), 1.7);
    EXPECT_FALSE(j.contains("replicas"));  // not part of this experiment's schema
}

TEST(Csv, NumberFormatting) {
    // Shortest round-trip text keeps bytes locale- and platform-stable.
    EXPECT_EQ(csv_num(0.1), "0.1");
    EXPECT_EQ(csv_num(1.0), "1");
    EXPECT_EQ(csv_num(-0.25), "-0.25");
    EXPECT_EQ(csv_num(1e-30), "1e-30");
    EXPECT_EQ(csv_num(std::uint64_t{42}), "42");
    double back = 0.0;
    const std::string s = csv_num(0.1 + 0.2);
    back = std::stod(s);
    EXPECT_EQ(back, 0.1 + 0.2);
}

TEST(Csv, TableBytes) {
    Table tbl;
    tbl.header = {"n", "v"};
    tbl.rows = {{"0", "0.5"}, {"1", "-1"}};
    EXPECT_EQ(to_csv(tbl), "n,v\n0,0.5\n1,-1\n");
    tbl.rows.push_back({"2"});
    EXPECT_THROW(to_csv(tbl), DomainError);
}

TEST(Drivers, LoziCondMixSchemaAndThreadInvariance) {
    RunConfig cfg = tiny_mix_config();
    const RunOutput one = run_experiment(cfg);
    const std::vector<std::string> want{"n",        "estimate_mid", "det_err",
                                        "stat_err", "replicas",     "samples"};
    EXPECT_EQ(one.table.header, want);
    ASSERT_EQ(one.table.rows.size(), cfg.n_max + 1);
    for (const auto& row : one.table.rows) {
        EXPECT_GE(std::stod(row[2]), 0.0);
        EXPECT_GT(std::stod(row[3]), 0.0);
        EXPECT_EQ(row[4], "2");
        EXPECT_GT(std::stod(row[5]), 0.0);
    }
    // Same replica streams, fixed reduction order: bytes cannot depend on the
    // thread count.
    cfg.threads = 3;
    const RunOutput three = run_experiment(cfg);
    EXPECT_EQ(to_csv(one.table), to_csv(three.table));
}

TEST(Drivers, LoziCondHistMassIsNormalized) {
    RunConfig cfg = default_config("lozi-cond-hist");
    cfg.samples = 20000;
    cfg.n_init = 200;
    const RunOutput out = run_experiment(cfg);
    const std::vector<std::string> want{"bin_lo", "bin_hi", "mass", "count"};
    EXPECT_EQ(out.table.header, want);
    EXPECT_GT(out.table.rows.size(), 10u);
    EXPECT_NEAR(column_sum(out.table, 2), 1.0, 1e-12);
    for (const auto& row : out.table.rows) {
        EXPECT_GE(std::stod(row[0]), -1.5);
        EXPECT_LE(std::stod(row[1]), 1.5);
        EXPECT_GT(std::stod(row[3]), 0.0);
    }
    EXPECT_GT(out.summary.at("slice_samples").get<std::uint64_t>(), 1000u);
}

TEST(Drivers, LoziCoveringSchema) {
    RunConfig cfg = default_config("lozi-covering");
    cfg.samples = 500;
    cfg.n_max = 3;
    cfg.attractor_points = 50000;
    const RunOutput out = run_experiment(cfg);
    const std::vector<std::string> want{"n", "d_n", "h", "occupied_a", "occupied_b"};
    EXPECT_EQ(out.table.header, want);
    ASSERT_EQ(out.table.rows.size(), 4u);
    for (const auto& row : out.table.rows) {
        EXPECT_GT(std::stod(row[1]), 0.0);
        EXPECT_DOUBLE_EQ(std::stod(row[2]), 0.01);
        EXPECT_GT(std::stod(row[4]), 1000.0);
    }
}

TEST(Drivers, BakerMixSchema) {
    RunConfig cfg = default_config("baker-mix");
    cfg.replicas = 4;
    cfg.samples = 2000;
    cfg.n_max = 4;
    const RunOutput out = run_experiment(cfg);
    ASSERT_EQ(out.table.rows.size(), 5u);
    for (const auto& row : out.table.rows) {
        EXPECT_EQ(row[2], "0");  // plain doubles: no deterministic radius
        EXPECT_GT(std::stod(row[3]), 0.0);
        EXPECT_EQ(row[4], "4");
        EXPECT_EQ(row[5], "8000");  // total draws across replicas
    }
}

TEST(Drivers, BakerFourierFitAndControl) {
    RunConfig cfg = default_config("baker-fourier");
    cfg.samples = 40000;
    cfg.j_max = 16;
    const RunOutput curved = run_experiment(cfg);
    ASSERT_EQ(curved.table.rows.size(), 17u);
    EXPECT_EQ(curved.table.rows[0][1], "1");  // j = 0 coefficient of a probability measure
    EXPECT_FALSE(curved.summary.at("eta").is_null());
    EXPECT_TRUE(std::isfinite(curved.summary.at("eta").get<double>()));

    // mu = 1/2 with stacked offsets makes the leaf measure Lebesgue, so every
    // nonzero coefficient sits at the Monte Carlo floor and no fit exists.
    cfg.mu = 0.5;
    cfg.offsets = {0.0, 0.5};
    cfg.psi = "identity";
    const RunOutput control = run_experiment(cfg);
    EXPECT_TRUE(control.summary.at("eta").is_null());
    const double floor_level = 3.0 / std::sqrt(static_cast<double>(cfg.samples));
    for (std::size_t j = 1; j < control.table.rows.size(); ++j)
        EXPECT_LT(std::stod(control.table.rows[j][1]), floor_level);
}

TEST(Drivers, BayesForecastSchema) {
    RunConfig cfg = default_config("bayes-forecast");
    cfg.sigma_list = {0.5, 0.0};
    cfg.n_max = 4;
    cfg.ensemble = 20000;
    cfg.srb_points = 100000;
    const RunOutput out = run_experiment(cfg);
    const std::vector<std::string> want{"sigma", "n", "abs_error", "stat_err"};
    EXPECT_EQ(out.table.header, want);
    ASSERT_EQ(out.table.rows.size(), 10u);
    EXPECT_EQ(out.table.rows[0][0], "0.5");
    EXPECT_EQ(out.table.rows[5][0], "0");
    for (const auto& row : out.table.rows) EXPECT_GT(std::stod(row[3]), 0.0);
    EXPECT_TRUE(out.summary.contains("srb_mean"));
    EXPECT_EQ(out.summary.at("curves").size(), 2u);
}

TEST(Manifest, ReproducibilityKeys) {
    const RunConfig cfg = default_config("baker-mix");
    nlohmann::ordered_json summary;
    summary["samples_per_replica"] = 7;
    const nlohmann::ordered_json m = manifest_json(cfg, summary);
    EXPECT_EQ(m.at("config").at("experiment"), "baker-mix");
    EXPECT_EQ(m.at("versions").at("condmix"), "0.1.0");
    EXPECT_TRUE(m.at("versions").contains("mpfr"));
    EXPECT_EQ(m.at("summary").at("samples_per_replica"), 7);
}
