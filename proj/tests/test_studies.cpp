#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "cmasao/errors.hpp"
#include "cmasao/studies.hpp"

using namespace cmasao;

TEST_CASE("config hashes are 64-bit FNV-1a hex strings") {
    CHECK(config_hash_of("") == "cbf29ce484222325");
    CHECK(config_hash_of("a") == "af63dc4c8601ec8c");
    CHECK(config_hash_of("foobar") == "85944171f73967e8");
    CHECK(config_hash_of("x") == config_hash_of("x"));
    CHECK(config_hash_of("x") != config_hash_of("y"));
    for (char c : config_hash_of("anything"))
        CHECK(std::string("0123456789abcdef").find(c) != std::string::npos);
}

TEST_CASE("meta serializes with fixed keys") {
    ReportMeta meta;
    meta.study = "speedup";
    meta.seed_base = 7;
    meta.config_hash = "abc";
    meta.timestamp = "2000-01-01T00:00:00Z";
    CHECK(meta_to_json(meta) ==
          "{\"study\":\"speedup\",\"seed_base\":7,\"config_hash\":\"abc\","
          "\"timestamp\":\"2000-01-01T00:00:00Z\"}");
}

TEST_CASE("speedup study shape and baseline convention") {
    SaoConfig cfg;
    const auto report = speedup_study({"sphere"}, {2}, 3, cfg, 42, 2);

    CHECK(report.meta.study == "speedup");
    CHECK(report.meta.seed_base == 42);
    CHECK(report.meta.config_hash.size() == 16);
    CHECK(!report.meta.timestamp.empty());

    REQUIRE(report.rows.size() == 2);
    const auto& base = report.rows[0];
    const auto& cand = report.rows[1];
    CHECK(base.function == "sphere");
    CHECK(base.n == 2);
    CHECK(base.algo == "cma-es");
    CHECK(!base.eps.has_value());
    CHECK(base.success_rate == 1.0);
    CHECK(base.spu == 1.0);
    CHECK(cand.algo == "cma-sao");
    CHECK(cand.mean_evals < base.mean_evals);
    CHECK(cand.spu == doctest::Approx(base.mean_evals / cand.mean_evals));

    // one es and one sao record per trial, in trial order
    REQUIRE(report.runs.size() == 6);
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
        CHECK(report.runs[i].function == "sphere");
        CHECK(report.runs[i].algo == (i % 2 == 0 ? "cma-es" : "cma-sao"));
    }

    CHECK_THROWS_AS(speedup_study({"sphere"}, {2}, 0, cfg, 1), DomainError);
}

TEST_CASE("speedup study is deterministic and thread-count independent") {
    SaoConfig cfg;
    const auto a = speedup_study({"sphere"}, {2}, 3, cfg, 77, 1);
    const auto b = speedup_study({"sphere"}, {2}, 3, cfg, 77, 3);
    CHECK(speedup_csv(a) == speedup_csv(b));
    CHECK(runs_jsonl(a.runs) == runs_jsonl(b.runs));
    CHECK(a.meta.config_hash == b.meta.config_hash);

    const auto c = speedup_study({"sphere"}, {2}, 3, cfg, 78, 2);
    CHECK(runs_jsonl(c.runs) != runs_jsonl(a.runs));
}

TEST_CASE("speedup csv formatting") {
    SpeedupReport report;
    report.rows.push_back({"sphere", 2, std::nullopt, "cma-es", 81.0, 1.0, 1.0});
    report.rows.push_back(
        {"noisy_sphere", 2, 0.35, "cma-sao", 123.456, 0.95, 1.9});
    CHECK(speedup_csv(report) ==
          "function,n,eps,algo,mean_evals,success_rate,spu\n"
          "sphere,2,,cma-es,81.00,1.0000,1.0000\n"
          "noisy_sphere,2,0.35,cma-sao,123.46,0.9500,1.9000\n");

    // undefined cells print as nan rather than inventing numbers
    SpeedupReport failed;
    failed.rows.push_back({"sphere", 2, std::nullopt, "cma-sao",
                           std::numeric_limits<double>::quiet_NaN(), 0.0,
                           std::numeric_limits<double>::quiet_NaN()});
    CHECK(speedup_csv(failed).find("nan") != std::string::npos);
}

TEST_CASE("noisy sphere rows carry their noise strength") {
    SaoConfig cfg;
    cfg.max_evals = 120; // shape test only; no need to run to convergence
    const auto report = speedup_study({"noisy_sphere"}, {2}, 1, cfg, 5);
    REQUIRE(report.rows.size() == 2);
    REQUIRE(report.rows[0].eps.has_value());
    CHECK(*report.rows[0].eps == 0.35);
    const std::string csv = speedup_csv(report);
    CHECK(csv.find("noisy_sphere,2,0.35,") != std::string::npos);
}

TEST_CASE("runs jsonl embeds the per-run records") {
    RunRecord rec;
    rec.function = "sphere";
    rec.n = 2;
    rec.algo = "cma-es";
    rec.result.evals_used = 10;
    rec.result.best_f = 1.0;
    rec.result.success = false;
    rec.result.seed = 3;
    const std::string line = runs_jsonl({rec});
    CHECK(line ==
          "{\"algo\":\"cma-es\",\"run\":{\"function\":\"sphere\",\"n\":2,"
          "\"seed\":3,\"evals\":10,\"best_f\":1.0,\"success\":false,"
          "\"injections_attempted\":0,\"injections_accepted\":0}}\n");
}

TEST_CASE("rbf comparison study covers both functions and all kernels") {
    const auto report = rbf_comparison_study({2}, 2, 42, 2);
    CHECK(report.meta.study == "rbf-comparison");
    REQUIRE(report.rows.size() == 6); // 2 functions x 1 dim x 3 kernels
    int cubic = 0, linear = 0, tps = 0;
    for (const auto& row : report.rows) {
        CHECK((row.function == "sphere" || row.function == "rosenbrock"));
        CHECK(row.dim == 2);
        CHECK(row.mean_err >= 0.0);
        CHECK(row.mean_err <= 1.0);
        if (row.kernel == "cubic")
            ++cubic;
        if (row.kernel == "linear")
            ++linear;
        if (row.kernel == "tps")
            ++tps;
    }
    CHECK(cubic == 2);
    CHECK(linear == 2);
    CHECK(tps == 2);

    const std::string csv = rbf_comparison_csv(report);
    CHECK(csv.substr(0, csv.find('\n')) == "function,dim,kernel,mean_err");
    CHECK(rbf_comparison_csv(rbf_comparison_study({2}, 2, 42, 1)) == csv);
    CHECK_THROWS_AS(rbf_comparison_study({2}, 0, 1), DomainError);
}

TEST_CASE("encoding benefit study emits rows and a contour grid") {
    const auto report = encoding_benefit_study(2, 3, 42, 11);
    CHECK(report.meta.study == "encoding-benefit");
    REQUIRE(report.rows.size() == 3);
    for (int r = 0; r < 3; ++r) {
        CHECK(report.rows[r].repeat == r);
        CHECK(report.rows[r].err_plain >= 0.0);
        CHECK(report.rows[r].err_plain <= 1.0);
        CHECK(report.rows[r].err_encoded >= 0.0);
        CHECK(report.rows[r].err_encoded <= 1.0);
    }
    CHECK(report.grid.size() == 121); // 11 x 11, first repeat only

    const std::string rows_csv = encoding_benefit_csv(report);
    CHECK(rows_csv.substr(0, rows_csv.find('\n')) ==
          "repeat,seed,err_plain,err_encoded");
    const std::string grid_csv = contour_grid_csv(report);
    CHECK(grid_csv.substr(0, grid_csv.find('\n')) == "x1,x2,f,f_plain,f_encoded");

    // deterministic re-run, byte for byte
    const auto again = encoding_benefit_study(2, 3, 42, 11);
    CHECK(encoding_benefit_csv(again) == rows_csv);
    CHECK(contour_grid_csv(again) == grid_csv);

    CHECK_THROWS_AS(encoding_benefit_study(1, 3, 42), InvalidDimensionError);
    CHECK_THROWS_AS(encoding_benefit_study(2, 0, 42), DomainError);
    CHECK_THROWS_AS(encoding_benefit_study(2, 3, 42, 1), DomainError);
}

TEST_CASE("timing study reports positive medians per dimension") {
    const auto report = timing_study({2, 4}, 42);
    CHECK(report.meta.study == "timing");
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].n == 2);
    CHECK(report.rows[1].n == 4);
    for (const auto& row : report.rows) {
        CHECK(row.fit_ms > 0.0);
        CHECK(row.predict_ms > 0.0);
    }
    const std::string csv = timing_csv(report);
    CHECK(csv.substr(0, csv.find('\n')) == "n,fit_ms,predict_ms");
    CHECK_THROWS_AS(timing_study({0}, 42), InvalidDimensionError);
}
