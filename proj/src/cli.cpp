#include "cmasao/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "cmasao/errors.hpp"
#include "cmasao/studies.hpp"

namespace cmasao {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out)
        throw Error("write failed: " + path.string());
}

fs::path ensure_outdir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t parsed) {
    if (opt->count() > 0)
        return parsed;
    if (const char* env = std::getenv("CMASAO_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 42;
}

FunctionVariant variant_from(const std::string& name) {
    if (name == "standard")
        return FunctionVariant::standard;
    if (name == "as-printed")
        return FunctionVariant::as_printed;
    throw DomainError("unknown variant '" + name + "' (valid: standard, as-printed)");
}

SigmaRate sigma_rate_from(const std::string& name) {
    if (name == "as-printed")
        return SigmaRate::as_printed;
    if (name == "csa")
        return SigmaRate::csa_standard;
    throw DomainError("unknown sigma rate '" + name + "' (valid: as-printed, csa)");
}

int default_jobs() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

struct RunOpts {
    std::string algo = "cma-sao";
    std::string fn;
    int dim = 0;
    int trials = 1;
    std::uint64_t seed = 42;
    std::string out;
    std::string kernel = "cubic";
    std::string variant = "standard";
    std::string sigma_rate = "as-printed";
    bool no_stagnation = false;
    double target = 1e-10;
    long max_evals = -1;
};

int cmd_run(const RunOpts& o, const CLI::Option* seed_opt) {
    const FunctionVariant variant = variant_from(o.variant);
    SaoConfig config;
    config.kernel = kernel_from_name(o.kernel);
    config.sigma_rate = sigma_rate_from(o.sigma_rate);
    config.stagnation_guard = !o.no_stagnation;
    config.target_f = o.target;
    if (o.max_evals >= 0)
        config.max_evals = o.max_evals;
    const std::uint64_t seed_base = resolve_seed(seed_opt, o.seed);

    std::string jsonl;
    std::vector<RunResult> results;
    for (int t = 0; t < o.trials; ++t) {
        BenchmarkFunction fn = make_function(o.fn, o.dim, variant);
        const std::uint64_t seed = derive_seed(seed_base, o.fn, o.dim, t);
        config.seed = seed;

        Problem problem;
        if (fn.noise_eps) {
            auto noise = std::make_shared<Rng>(derive_stream(seed, 0x6e6f5eULL));
            problem.measure = [fn, noise](const Vector& x) {
                return fn.evaluate(x, noise.get());
            };
        } else {
            problem.measure = [fn](const Vector& x) { return fn.evaluate(x); };
        }
        problem.progress = [fn](const Vector& x) { return fn.true_value(x); };

        RunResult r;
        if (o.algo == "cma-es")
            r = run_cma_es(problem, o.dim, fn.init_box, fn.sigma0, config);
        else
            r = run_cma_sao(problem, o.dim, fn.init_box, fn.sigma0, config);
        results.push_back(r);
        jsonl += run_result_to_json(o.fn, o.dim, r) + "\n";
    }

    long successes = 0;
    for (const auto& r : results)
        if (r.success)
            ++successes;
    char summary[256];
    double mean = std::numeric_limits<double>::quiet_NaN();
    if (successes > 0) {
        long total = 0;
        for (const auto& r : results)
            if (r.success)
                total += r.evals_used;
        mean = static_cast<double>(total) / static_cast<double>(successes);
    }
    std::snprintf(summary, sizeof(summary),
                  "summary: %s n=%d algo=%s trials=%d successes=%ld mean_evals=%.2f",
                  o.fn.c_str(), o.dim, o.algo.c_str(), o.trials, successes, mean);

    std::cout << jsonl << summary << "\n";
    if (!o.out.empty()) {
        const fs::path dir = ensure_outdir(o.out);
        write_file(dir / "runs.jsonl", jsonl);
        write_file(dir / "summary.txt", std::string(summary) + "\n");
    }
    return 0;
}

struct CompareOpts {
    std::vector<std::string> fns;
    std::vector<int> dims;
    int trials = 20;
    std::uint64_t seed = 42;
    std::string out = "results";
    std::string kernel = "cubic";
    std::string sigma_rate = "as-printed";
    bool no_stagnation = false;
    double target = 1e-10;
    int jobs = default_jobs();
};

int cmd_compare(const CompareOpts& o, const CLI::Option* seed_opt) {
    SaoConfig config;
    config.kernel = kernel_from_name(o.kernel);
    config.sigma_rate = sigma_rate_from(o.sigma_rate);
    config.stagnation_guard = !o.no_stagnation;
    config.target_f = o.target;
    const std::uint64_t seed = resolve_seed(seed_opt, o.seed);

    const SpeedupReport report =
        speedup_study(o.fns, o.dims, o.trials, config, seed, o.jobs);

    const fs::path dir = ensure_outdir(o.out);
    write_file(dir / "compare.csv", speedup_csv(report));
    write_file(dir / "runs.jsonl", runs_jsonl(report.runs));
    write_file(dir / "meta.json", meta_to_json(report.meta) + "\n");
    std::cout << speedup_csv(report);
    return 0;
}

} // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"CMA-ES / CMA-SAO black-box optimizer and experiment harness"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run one algorithm on one function");
    RunOpts ro;
    run->add_option("--algo", ro.algo, "Algorithm")
        ->check(CLI::IsMember({"cma-es", "cma-sao"}))
        ->capture_default_str();
    run->add_option("--fn", ro.fn, "Function name")->required();
    run->add_option("--dim", ro.dim, "Dimension")->required()->check(CLI::PositiveNumber);
    run->add_option("--trials", ro.trials, "Seeded trials")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    auto* run_seed = run->add_option("--seed", ro.seed,
                                     "Base seed (default: $CMASAO_SEED or 42)");
    run->add_option("--out", ro.out, "Output directory (also prints to stdout)");
    run->add_option("--kernel", ro.kernel, "RBF kernel")
        ->check(CLI::IsMember({"cubic", "linear", "tps"}))
        ->capture_default_str();
    run->add_option("--variant", ro.variant, "Formula variant")
        ->check(CLI::IsMember({"standard", "as-printed"}))
        ->capture_default_str();
    run->add_option("--sigma-rate", ro.sigma_rate, "Injection sigma-update rate")
        ->check(CLI::IsMember({"as-printed", "csa"}))
        ->capture_default_str();
    run->add_flag("--no-stagnation-guard", ro.no_stagnation,
                  "Disable the stagnation stop");
    run->add_option("--target", ro.target, "Termination target f")
        ->capture_default_str();
    run->add_option("--max-evals", ro.max_evals,
                    "Evaluation budget (default 1000*N^2)");

    auto* compare = app.add_subcommand(
        "compare", "Matched-seed CMA-ES vs CMA-SAO speedup table");
    CompareOpts co;
    compare->add_option("--fns", co.fns, "Function names")
        ->required()
        ->delimiter(',');
    compare->add_option("--dims", co.dims, "Dimensions")->required()->delimiter(',');
    compare->add_option("--trials", co.trials, "Trials per cell")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    auto* compare_seed = compare->add_option(
        "--seed", co.seed, "Base seed (default: $CMASAO_SEED or 42)");
    compare->add_option("--out", co.out, "Output directory")->capture_default_str();
    compare->add_option("--kernel", co.kernel, "RBF kernel")
        ->check(CLI::IsMember({"cubic", "linear", "tps"}))
        ->capture_default_str();
    compare->add_option("--sigma-rate", co.sigma_rate, "Injection sigma-update rate")
        ->check(CLI::IsMember({"as-printed", "csa"}))
        ->capture_default_str();
    compare->add_flag("--no-stagnation-guard", co.no_stagnation,
                      "Disable the stagnation stop");
    compare->add_option("--target", co.target, "Termination target f")
        ->capture_default_str();
    compare->add_option("--jobs", co.jobs, "Worker threads")->capture_default_str();

    auto* rbf = app.add_subcommand("rbf-bench", "Kernel comparison study");
    std::vector<int> rbf_dims = {2, 4, 8, 16, 32, 64, 128};
    int rbf_repeats = 20;
    std::uint64_t rbf_seed = 42;
    std::string rbf_out = "results";
    int rbf_jobs = default_jobs();
    rbf->add_option("--dims", rbf_dims, "Dimensions")
        ->delimiter(',')
        ->capture_default_str();
    rbf->add_option("--repeats", rbf_repeats, "Repeats per cell")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    auto* rbf_seed_opt =
        rbf->add_option("--seed", rbf_seed, "Base seed (default: $CMASAO_SEED or 42)");
    rbf->add_option("--out", rbf_out, "Output directory")->capture_default_str();
    rbf->add_option("--jobs", rbf_jobs, "Worker threads")->capture_default_str();

    auto* contour = app.add_subcommand(
        "contour", "Encoding-benefit study with contour grid");
    int contour_dim = 2;
    int contour_repeats = 20;
    int contour_grid = 101;
    std::uint64_t contour_seed = 42;
    std::string contour_out = "results";
    contour->add_option("--dim", contour_dim, "Dimension")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    contour->add_option("--repeats", contour_repeats, "Repeats")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    contour->add_option("--grid", contour_grid, "Grid resolution per axis")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    auto* contour_seed_opt = contour->add_option(
        "--seed", contour_seed, "Base seed (default: $CMASAO_SEED or 42)");
    contour->add_option("--out", contour_out, "Output directory")
        ->capture_default_str();

    auto* timing = app.add_subcommand("timing", "Surrogate fit/predict timing study");
    std::vector<int> timing_dims = {25, 50, 100};
    std::uint64_t timing_seed = 42;
    std::string timing_out = "results";
    timing->add_option("--dims", timing_dims, "Dimensions")
        ->delimiter(',')
        ->capture_default_str();
    auto* timing_seed_opt = timing->add_option(
        "--seed", timing_seed, "Base seed (default: $CMASAO_SEED or 42)");
    timing->add_option("--out", timing_out, "Output directory")
        ->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        // Validate names before any work so typos exit as usage errors.
        if (run->parsed()) {
            make_function(ro.fn, ro.dim, variant_from(ro.variant));
        } else if (compare->parsed()) {
            for (const auto& f : co.fns)
                for (int d : co.dims)
                    make_function(f, d);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (run->parsed())
            return cmd_run(ro, run_seed);
        if (compare->parsed())
            return cmd_compare(co, compare_seed);
        if (rbf->parsed()) {
            const auto report = rbf_comparison_study(
                rbf_dims, rbf_repeats, resolve_seed(rbf_seed_opt, rbf_seed), rbf_jobs);
            const fs::path dir = ensure_outdir(rbf_out);
            write_file(dir / "rbf_comparison.csv", rbf_comparison_csv(report));
            write_file(dir / "meta.json", meta_to_json(report.meta) + "\n");
            std::cout << rbf_comparison_csv(report);
            return 0;
        }
        if (contour->parsed()) {
            const auto report = encoding_benefit_study(
                contour_dim, contour_repeats,
                resolve_seed(contour_seed_opt, contour_seed), contour_grid);
            const fs::path dir = ensure_outdir(contour_out);
            write_file(dir / "encoding_benefit.csv", encoding_benefit_csv(report));
            write_file(dir / "contour_grid.csv", contour_grid_csv(report));
            write_file(dir / "meta.json", meta_to_json(report.meta) + "\n");
            std::cout << encoding_benefit_csv(report);
            return 0;
        }
        if (timing->parsed()) {
            const auto report =
                timing_study(timing_dims, resolve_seed(timing_seed_opt, timing_seed));
            const fs::path dir = ensure_outdir(timing_out);
            write_file(dir / "timing.csv", timing_csv(report));
            write_file(dir / "meta.json", meta_to_json(report.meta) + "\n");
            std::cout << timing_csv(report);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace cmasao
