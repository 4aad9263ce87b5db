#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmasao/functions.hpp"
#include "cmasao/sao.hpp"

namespace cmasao {

struct ReportMeta {
    std::string study;
    std::uint64_t seed_base = 0;
    std::string config_hash; // FNV-1a of the canonical config string
    std::string timestamp;   // wall clock; excluded from determinism checks
};

std::string config_hash_of(const std::string& canonical_config);
std::string meta_to_json(const ReportMeta& meta);

/// One stored run of the speedup study, traceable by seed.
struct RunRecord {
    std::string function;
    int n = 0;
    std::string algo; // "cma-es" | "cma-sao"
    RunResult result;
};

struct SpeedupRow {
    std::string function;
    int n = 0;
    std::optional<double> eps;
    std::string algo;
    double mean_evals = 0.0;   // NaN when no run succeeded
    double success_rate = 0.0;
    double spu = 0.0;          // NaN when undefined
};

struct SpeedupReport {
    ReportMeta meta;
    std::vector<SpeedupRow> rows;
    std::vector<RunRecord> runs;
};

struct RbfComparisonRow {
    std::string function;
    int dim = 0;
    std::string kernel;
    double mean_err = 0.0;
};

struct RbfComparisonReport {
    ReportMeta meta;
    std::vector<RbfComparisonRow> rows;
};

struct EncodingBenefitRow {
    int repeat = 0;
    std::uint64_t seed = 0;
    double err_plain = 0.0;
    double err_encoded = 0.0;
};

struct GridPoint {
    double x1 = 0.0, x2 = 0.0;
    double f = 0.0, f_plain = 0.0, f_encoded = 0.0;
};

struct EncodingBenefitReport {
    ReportMeta meta;
    std::vector<EncodingBenefitRow> rows;
    std::vector<GridPoint> grid; // contour data from the first repeat
};

struct TimingRow {
    int n = 0;
    double fit_ms = 0.0;
    double predict_ms = 0.0; // 500 predictions
};

struct TimingReport {
    ReportMeta meta;
    std::vector<TimingRow> rows;
};

/// Matched-seed CMA-ES vs CMA-SAO sweep; target 1e-10, budget 1000*N^2.
SpeedupReport speedup_study(const std::vector<std::string>& functions,
                            const std::vector<int>& dims, int trials,
                            const SaoConfig& config, std::uint64_t seed_base,
                            int jobs = 1);

/// Kernel comparison on Sphere and Rosenbrock: uniform data in [-2,2]^d,
/// training sizes 2(d+1) and 5(d+1), test sets 10x, identity encoding,
/// mean ranking error over `repeats`.
RbfComparisonReport rbf_comparison_study(const std::vector<int>& dims, int repeats,
                                         std::uint64_t seed_base, int jobs = 1);

/// Rotated-ellipsoid fit with and without the covariance encoding, ranking
/// error on held-out points, plus a contour grid for plotting.
EncodingBenefitReport encoding_benefit_study(int dim, int repeats,
                                             std::uint64_t seed_base,
                                             int grid_res = 101);

/// Wall-clock cost of fitting floor(100*sqrt(n)) points and predicting 500,
/// median of 5 runs, single-threaded.
TimingReport timing_study(const std::vector<int>& dims, std::uint64_t seed_base);

// CSV serialization; one schema per study, deterministic bytes.
std::string speedup_csv(const SpeedupReport& report);
std::string runs_jsonl(const std::vector<RunRecord>& runs);
std::string rbf_comparison_csv(const RbfComparisonReport& report);
std::string encoding_benefit_csv(const EncodingBenefitReport& report);
std::string contour_grid_csv(const EncodingBenefitReport& report);
std::string timing_csv(const TimingReport& report);

} // namespace cmasao
