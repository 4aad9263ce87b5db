#include "cmasao/studies.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <json.hpp>
#include <memory>
#include <thread>

#include "cmasao/archive.hpp"
#include "cmasao/errors.hpp"

namespace cmasao {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

std::string iso_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                  utc.tm_year + 1900, utc.tm_mon + 1, utc.tm_mday, utc.tm_hour,
                  utc.tm_min, utc.tm_sec);
    return buf;
}

// Fan out `count` self-contained units over up to `jobs` threads; results
// must be slotted by index inside `work` so the reduce is order-free.
void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& work) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            work(i);
        return;
    }
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = next++; i < count; i = next++)
                    work(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

Problem problem_of(const BenchmarkFunction& fn, std::uint64_t run_seed) {
    Problem problem;
    if (fn.noise_eps) {
        auto noise = std::make_shared<Rng>(derive_stream(run_seed, 0x6e6f5eULL));
        problem.measure = [fn, noise](const Vector& x) {
            return fn.evaluate(x, noise.get());
        };
    } else {
        problem.measure = [fn](const Vector& x) { return fn.evaluate(x); };
    }
    problem.progress = [fn](const Vector& x) { return fn.true_value(x); };
    return problem;
}

double mean_or_nan(const std::vector<RunResult>& runs) {
    long total = 0;
    long count = 0;
    for (const auto& r : runs) {
        if (r.success) {
            total += r.evals_used;
            ++count;
        }
    }
    if (count == 0)
        return nan_value;
    return static_cast<double>(total) / static_cast<double>(count);
}

double rate_of(const std::vector<RunResult>& runs) {
    long count = 0;
    for (const auto& r : runs)
        if (r.success)
            ++count;
    return static_cast<double>(count) / static_cast<double>(runs.size());
}

} // namespace

std::string config_hash_of(const std::string& canonical_config) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical_config)));
    return buf;
}

std::string meta_to_json(const ReportMeta& meta) {
    nlohmann::ordered_json j;
    j["study"] = meta.study;
    j["seed_base"] = meta.seed_base;
    j["config_hash"] = meta.config_hash;
    j["timestamp"] = meta.timestamp;
    return j.dump();
}

SpeedupReport speedup_study(const std::vector<std::string>& functions,
                            const std::vector<int>& dims, int trials,
                            const SaoConfig& config, std::uint64_t seed_base,
                            int jobs) {
    if (trials < 1)
        throw DomainError("trials must be >= 1");

    SpeedupReport report;
    report.meta.study = "speedup";
    report.meta.seed_base = seed_base;
    report.meta.timestamp = iso_timestamp();
    {
        std::string canon = "speedup|trials=" + std::to_string(trials);
        for (const auto& f : functions)
            canon += "|" + f;
        for (int d : dims)
            canon += "|" + std::to_string(d);
        canon += "|kernel=" + kernel_name(config.kernel);
        report.meta.config_hash = config_hash_of(canon);
    }

    struct Unit {
        std::string function;
        int dim = 0;
        int trial = 0;
    };
    std::vector<Unit> units;
    for (const auto& fname : functions)
        for (int dim : dims)
            for (int t = 0; t < trials; ++t)
                units.push_back({fname, dim, t});

    struct UnitResult {
        RunResult es;
        RunResult sao;
    };
    std::vector<UnitResult> results(units.size());

    parallel_for(units.size(), jobs, [&](std::size_t i) {
        const Unit& u = units[i];
        const BenchmarkFunction fn = make_function(u.function, u.dim);
        const std::uint64_t seed = derive_seed(seed_base, u.function, u.dim, u.trial);
        SaoConfig cfg = config;
        cfg.seed = seed;
        // Matched seeds: both algorithms see the same problem and stream.
        results[i].es = run_cma_es(problem_of(fn, seed), u.dim, fn.init_box,
                                   fn.sigma0, cfg);
        results[i].sao = run_cma_sao(problem_of(fn, seed), u.dim, fn.init_box,
                                     fn.sigma0, cfg);
    });

    std::size_t idx = 0;
    for (const auto& fname : functions) {
        for (int dim : dims) {
            std::vector<RunResult> es_runs, sao_runs;
            es_runs.reserve(trials);
            sao_runs.reserve(trials);
            for (int t = 0; t < trials; ++t, ++idx) {
                es_runs.push_back(results[idx].es);
                sao_runs.push_back(results[idx].sao);
                report.runs.push_back({fname, dim, "cma-es", results[idx].es});
                report.runs.push_back({fname, dim, "cma-sao", results[idx].sao});
            }
            std::optional<double> eps;
            if (fname == "noisy_sphere")
                eps = noisy_sphere_eps(dim);

            const double mean_es = mean_or_nan(es_runs);
            const double mean_sao = mean_or_nan(sao_runs);
            SpeedupRow base{fname, dim, eps, "cma-es", mean_es, rate_of(es_runs),
                            std::isnan(mean_es) ? nan_value : 1.0};
            SpeedupRow cand{fname, dim, eps, "cma-sao", mean_sao, rate_of(sao_runs),
                            mean_es / mean_sao};
            report.rows.push_back(base);
            report.rows.push_back(cand);
        }
    }
    return report;
}

RbfComparisonReport rbf_comparison_study(const std::vector<int>& dims, int repeats,
                                         std::uint64_t seed_base, int jobs) {
    if (repeats < 1)
        throw DomainError("repeats must be >= 1");

    RbfComparisonReport report;
    report.meta.study = "rbf-comparison";
    report.meta.seed_base = seed_base;
    report.meta.timestamp = iso_timestamp();
    {
        std::string canon = "rbf-comparison|repeats=" + std::to_string(repeats);
        for (int d : dims)
            canon += "|" + std::to_string(d);
        report.meta.config_hash = config_hash_of(canon);
    }

    const std::vector<std::string> functions = {"sphere", "rosenbrock"};
    const std::vector<RbfKernel> kernels = {RbfKernel::cubic, RbfKernel::linear,
                                            RbfKernel::thin_plate_spline};

    struct Unit {
        std::size_t fn_idx;
        int dim;
        int repeat;
    };
    std::vector<Unit> units;
    for (std::size_t f = 0; f < functions.size(); ++f)
        for (int d : dims)
            for (int r = 0; r < repeats; ++r)
                units.push_back({f, d, r});

    // errs[unit][kernel]
    std::vector<std::array<double, 3>> errs(units.size());

    parallel_for(units.size(), jobs, [&](std::size_t i) {
        const Unit& u = units[i];
        const std::string& fname = functions[u.fn_idx];
        const BenchmarkFunction fn = make_function(fname, u.dim);
        const long train_k = (fname == "sphere" ? 2 : 5) * (u.dim + 1);
        const long test_k = 10 * train_k;
        Rng rng(derive_seed(seed_base, fname + ":rbf", u.dim, u.repeat));

        Matrix train(train_k, u.dim);
        Vector values(train_k);
        for (long p = 0; p < train_k; ++p) {
            for (int d = 0; d < u.dim; ++d)
                train(p, d) = rng.uniform(-2.0, 2.0);
            values(p) = fn.true_value(train.row(p).transpose());
        }
        std::vector<std::pair<Vector, double>> test;
        test.reserve(test_k);
        for (long p = 0; p < test_k; ++p) {
            Vector x(u.dim);
            for (int d = 0; d < u.dim; ++d)
                x(d) = rng.uniform(-2.0, 2.0);
            test.emplace_back(x, fn.true_value(x));
        }
        for (std::size_t k = 0; k < kernels.size(); ++k) {
            const RbfModel model = fit_rbf(train, values, kernels[k]);
            errs[i][k] = ranking_error(model, test);
        }
    });

    std::size_t idx = 0;
    for (std::size_t f = 0; f < functions.size(); ++f) {
        for (int d : dims) {
            std::array<double, 3> sums{0.0, 0.0, 0.0};
            for (int r = 0; r < repeats; ++r, ++idx)
                for (std::size_t k = 0; k < kernels.size(); ++k)
                    sums[k] += errs[idx][k];
            for (std::size_t k = 0; k < kernels.size(); ++k)
                report.rows.push_back({functions[f], d, kernel_name(kernels[k]),
                                       sums[k] / repeats});
        }
    }
    return report;
}

EncodingBenefitReport encoding_benefit_study(int dim, int repeats,
                                             std::uint64_t seed_base, int grid_res) {
    if (dim < 2)
        throw InvalidDimensionError("encoding study needs dimension >= 2");
    if (repeats < 1)
        throw DomainError("repeats must be >= 1");
    if (grid_res < 2)
        throw DomainError("grid resolution must be >= 2");

    EncodingBenefitReport report;
    report.meta.study = "encoding-benefit";
    report.meta.seed_base = seed_base;
    report.meta.timestamp = iso_timestamp();
    report.meta.config_hash = config_hash_of(
        "encoding-benefit|dim=" + std::to_string(dim) +
        "|repeats=" + std::to_string(repeats) + "|grid=" + std::to_string(grid_res));

    const CmaParams params = default_params(dim);

    for (int r = 0; r < repeats; ++r) {
        const std::uint64_t seed = derive_seed(seed_base, "ellipsoid:rotated", dim, r);
        BenchmarkFunction fn = make_function("ellipsoid", dim);
        fn.rotation = random_rotation(dim, derive_stream(seed, 1));
        const ObjectiveFn objective = [&fn](const Vector& x) { return fn.evaluate(x); };

        CmaState state = init_cma(params, fn.init_box, fn.sigma0, derive_stream(seed, 2));
        Archive archive;
        // Let the strategy learn an anisotropic covariance before fitting.
        for (int g = 0; g < 150; ++g) {
            gen_cma(state, params, objective, &archive);
            if (!state.eig.fresh)
                refresh_eigen(state);
            const double cond = state.eig.scale.maxCoeff() / state.eig.scale.minCoeff();
            if (cond * cond >= 1e3)
                break;
        }

        auto training = select_training_set(archive, dim);
        if (!state.eig.fresh)
            refresh_eigen(state);
        const EncodingTransform enc{state.mean, state.eig.inv_sqrt, state.generation};

        const long k = static_cast<long>(training.size());
        Matrix plain_pts(k, dim), enc_pts(k, dim);
        Vector values(k);
        for (long i = 0; i < k; ++i) {
            plain_pts.row(i) = training[i].x.transpose();
            enc_pts.row(i) = encode(enc, training[i].x).transpose();
            values(i) = training[i].y;
        }
        const RbfModel plain = fit_rbf(plain_pts, values, RbfKernel::cubic);
        RbfModel encoded = fit_rbf(enc_pts, values, RbfKernel::cubic);
        encoded.transform = enc;

        // Held-out points from the current sampling distribution.
        Rng test_rng(derive_stream(seed, 3));
        const long test_k = 10 * k;
        std::vector<std::pair<Vector, double>> test;
        test.reserve(test_k);
        for (long t = 0; t < test_k; ++t) {
            Vector z(dim);
            for (int d = 0; d < dim; ++d)
                z(d) = test_rng.normal();
            const Vector x = state.mean + state.sigma * (state.eig.basis *
                             (state.eig.scale.asDiagonal() * z));
            test.emplace_back(x, fn.true_value(x));
        }
        report.rows.push_back(
            {r, seed, ranking_error(plain, test), ranking_error(encoded, test)});

        if (r == 0 && dim == 2) {
            Vector lo = plain_pts.colwise().minCoeff().transpose();
            Vector hi = plain_pts.colwise().maxCoeff().transpose();
            const Vector pad = 0.1 * (hi - lo);
            lo -= pad;
            hi += pad;
            report.grid.reserve(static_cast<std::size_t>(grid_res) * grid_res);
            for (int i = 0; i < grid_res; ++i) {
                const double x1 = lo(0) + (hi(0) - lo(0)) * i / (grid_res - 1);
                for (int j = 0; j < grid_res; ++j) {
                    const double x2 = lo(1) + (hi(1) - lo(1)) * j / (grid_res - 1);
                    Vector x(2);
                    x << x1, x2;
                    report.grid.push_back({x1, x2, fn.true_value(x),
                                           predict(plain, x), predict(encoded, x)});
                }
            }
        }
    }
    return report;
}

TimingReport timing_study(const std::vector<int>& dims, std::uint64_t seed_base) {
    TimingReport report;
    report.meta.study = "timing";
    report.meta.seed_base = seed_base;
    report.meta.timestamp = iso_timestamp();
    {
        std::string canon = "timing";
        for (int d : dims)
            canon += "|" + std::to_string(d);
        report.meta.config_hash = config_hash_of(canon);
    }

    using clock = std::chrono::steady_clock;
    volatile double sink = 0.0;

    for (int n : dims) {
        if (n < 1)
            throw InvalidDimensionError("dimension must be >= 1");
        const long train_k =
            static_cast<long>(std::floor(100.0 * std::sqrt(static_cast<double>(n))));
        Rng rng(derive_seed(seed_base, "timing", n, 0));

        Matrix train(train_k, n);
        Vector values(train_k);
        for (long p = 0; p < train_k; ++p) {
            for (int d = 0; d < n; ++d)
                train(p, d) = rng.uniform(-2.0, 2.0);
            values(p) = train.row(p).squaredNorm();
        }
        std::vector<Vector> test;
        test.reserve(500);
        for (int p = 0; p < 500; ++p) {
            Vector x(n);
            for (int d = 0; d < n; ++d)
                x(d) = rng.uniform(-2.0, 2.0);
            test.push_back(std::move(x));
        }

        std::array<double, 5> fit_ms{}, predict_ms{};
        for (int rep = 0; rep < 5; ++rep) {
            const auto t0 = clock::now();
            const RbfModel model = fit_rbf(train, values, RbfKernel::cubic);
            const auto t1 = clock::now();
            for (const auto& x : test)
                sink = sink + predict(model, x);
            const auto t2 = clock::now();
            fit_ms[rep] = std::chrono::duration<double, std::milli>(t1 - t0).count();
            predict_ms[rep] = std::chrono::duration<double, std::milli>(t2 - t1).count();
        }
        std::sort(fit_ms.begin(), fit_ms.end());
        std::sort(predict_ms.begin(), predict_ms.end());
        report.rows.push_back({n, fit_ms[2], predict_ms[2]});
    }
    return report;
}

std::string speedup_csv(const SpeedupReport& report) {
    std::string out = "function,n,eps,algo,mean_evals,success_rate,spu\n";
    for (const auto& row : report.rows) {
        out += row.function + "," + std::to_string(row.n) + ",";
        if (row.eps)
            out += fmt("%.2f", *row.eps);
        out += "," + row.algo + "," + fmt("%.2f", row.mean_evals) + "," +
               fmt("%.4f", row.success_rate) + "," + fmt("%.4f", row.spu) + "\n";
    }
    return out;
}

std::string runs_jsonl(const std::vector<RunRecord>& runs) {
    std::string out;
    for (const auto& rec : runs) {
        nlohmann::ordered_json j;
        j["algo"] = rec.algo;
        j["run"] = nlohmann::ordered_json::parse(
            run_result_to_json(rec.function, rec.n, rec.result));
        out += j.dump();
        out += "\n";
    }
    return out;
}

std::string rbf_comparison_csv(const RbfComparisonReport& report) {
    std::string out = "function,dim,kernel,mean_err\n";
    for (const auto& row : report.rows)
        out += row.function + "," + std::to_string(row.dim) + "," + row.kernel + "," +
               fmt("%.6f", row.mean_err) + "\n";
    return out;
}

std::string encoding_benefit_csv(const EncodingBenefitReport& report) {
    std::string out = "repeat,seed,err_plain,err_encoded\n";
    for (const auto& row : report.rows)
        out += std::to_string(row.repeat) + "," + std::to_string(row.seed) + "," +
               fmt("%.6f", row.err_plain) + "," + fmt("%.6f", row.err_encoded) + "\n";
    return out;
}

std::string contour_grid_csv(const EncodingBenefitReport& report) {
    std::string out = "x1,x2,f,f_plain,f_encoded\n";
    for (const auto& p : report.grid)
        out += fmt("%.10g", p.x1) + "," + fmt("%.10g", p.x2) + "," +
               fmt("%.10g", p.f) + "," + fmt("%.10g", p.f_plain) + "," +
               fmt("%.10g", p.f_encoded) + "\n";
    return out;
}

std::string timing_csv(const TimingReport& report) {
    std::string out = "n,fit_ms,predict_ms\n";
    for (const auto& row : report.rows)
        out += std::to_string(row.n) + "," + fmt("%.3f", row.fit_ms) + "," +
               fmt("%.3f", row.predict_ms) + "\n";
    return out;
}

} // namespace cmasao
