#include "cmasao/sao.hpp"

#include <cmath>
#include <json.hpp>

#include "cmasao/archive.hpp"
#include "cmasao/errors.hpp"

namespace cmasao {

InjectionRates injection_rates(int dim) {
    if (dim < 1)
        throw InvalidDimensionError("dimension must be >= 1");
    const double n = static_cast<double>(dim);
    InjectionRates r;
    r.c_sigma_inj = 3.0 / (n + 4.0);
    r.c_c_inj = (4.0 + 1.0 / n) / (n + 4.0 + 2.0 / n);
    r.c_cov_inj = 2.0 / ((n + 1.3) * (n + 1.3) + 1.0);
    r.d_sigma_inj = 1.0 + r.c_sigma_inj;
    return r;
}

void inject_best(CmaState& state, const Vector& x_best, const CmaParams& params,
                 SigmaRate sigma_rate) {
    const auto r = injection_rates(params.dim);
    if (!state.eig.fresh)
        refresh_eigen(state);

    const Vector step = (x_best - state.mean) / state.sigma;
    state.p_sigma = (1.0 - r.c_sigma_inj) * state.p_sigma +
                    std::sqrt(r.c_sigma_inj * (2.0 - r.c_sigma_inj)) *
                        (state.eig.inv_sqrt * step);
    state.p_c = (1.0 - r.c_c_inj) * state.p_c +
                std::sqrt(r.c_c_inj * (2.0 - r.c_c_inj)) * step;
    state.cov = (1.0 - r.c_cov_inj) * state.cov +
                r.c_cov_inj * (state.p_c * state.p_c.transpose());

    const double rate =
        sigma_rate == SigmaRate::as_printed ? r.c_cov_inj : r.c_sigma_inj;
    state.sigma *=
        std::exp(rate / r.d_sigma_inj * (state.p_sigma.norm() / params.chi_n - 1.0));
    state.mean = x_best;
    state.eig.fresh = false;
    refresh_eigen(state);
}

namespace {

struct Runner {
    const Problem& problem;
    const SaoConfig& config;
    CmaParams params;
    CmaState state;
    Archive archive;
    RunResult result;
    long max_evals;
    double best = std::numeric_limits<double>::infinity();
    long true_gens = 0;
    double stag_ref = std::numeric_limits<double>::infinity();
    long stag_gen = 0;
    bool done = false;

    Runner(const Problem& p, int dim, const Box& init_box, double sigma0,
           const SaoConfig& c)
        : problem(p), config(c), params(default_params(dim)),
          state(init_cma(params, init_box, sigma0, c.seed)) {
        max_evals = c.max_evals.value_or(1000L * dim * dim);
        result.seed = c.seed;
    }

    void track(const Vector& x, double measured) {
        const double fp = problem.progress ? problem.progress(x) : measured;
        if (fp < best)
            best = fp;
    }

    // Called after every batch of true evaluations.
    void checkpoint() {
        result.history.emplace_back(state.eval_count, best);
        if (best <= config.target_f) {
            result.success = true;
            done = true;
        }
    }

    bool can_spend(long k) const { return state.eval_count + k <= max_evals; }

    void true_generation() {
        if (done)
            return;
        if (!can_spend(params.lambda)) {
            done = true;
            return;
        }
        ObjectiveFn tracked = [this](const Vector& x) {
            const double y = problem.measure(x);
            track(x, y);
            return y;
        };
        gen_cma(state, params, tracked, &archive);
        ++true_gens;
        checkpoint();
        if (done)
            return;
        if (config.stagnation_guard) {
            if (best < stag_ref - 1e-14) {
                stag_ref = best;
                stag_gen = true_gens;
            } else if (true_gens - stag_gen >= 50L * params.dim) {
                done = true;
            }
        }
    }

    double probe(const Vector& x) {
        const double y = problem.measure(x);
        if (!std::isfinite(y))
            throw EvaluationError("objective returned non-finite value", x);
        archive.add(x, y, state.generation);
        state.eval_count += 1;
        track(x, y);
        return y;
    }

    long distinct_archive_points() {
        if (archive.empty())
            return 0;
        return static_cast<long>(select_training_set(archive, params.dim).size());
    }

    void finish() {
        result.evals_used = state.eval_count;
        result.best_f = best;
    }
};

} // namespace

RunResult run_cma_sao(const Problem& problem, int dim, const Box& init_box,
                      double sigma0, const SaoConfig& config, const RunHooks* hooks) {
    Runner run(problem, dim, init_box, sigma0, config);
    SurrogateController controller;
    controller.tau_err = config.tau_err;
    controller.beta_err = config.beta_err;
    controller.n_hat_max = config.n_hat_max;
    Rng ls_rng(derive_stream(config.seed, 0x6c73)); // local-search start stream
    const long ls_budget = config.ls_budget.value_or(100L * dim);

    for (int g = 0; g < config.g_start && !run.done; ++g)
        run.true_generation();

    while (!run.done) {
        // A surrogate needs at least N+2 distinct archive points; on large N
        // the warm-up alone may not provide them yet.
        while (!run.done && run.distinct_archive_points() < dim + 2)
            run.true_generation();
        if (run.done)
            break;

        IterationAudit audit;
        bool emitted = false;
        auto emit = [&]() {
            if (hooks && hooks->on_iteration && !emitted) {
                hooks->on_iteration(audit);
                emitted = true;
            }
        };
        // Every emitted audit reflects the state at that moment, including
        // the truncated final iteration.
        auto snapshot_state = [&]() {
            if (!run.state.eig.fresh)
                refresh_eigen(run.state);
            const double min_scale = run.state.eig.scale.minCoeff();
            audit.min_cov_eigenvalue = min_scale * min_scale;
            audit.sigma = run.state.sigma;
        };

        RbfModel model = build_surrogate(run.archive, run.state, config.kernel);
        audit.mean_before_probe = run.state.mean;
        audit.mean_after_probe = run.state.mean;

        auto training = select_training_set(run.archive, dim);
        std::vector<Vector> training_points;
        training_points.reserve(training.size());
        for (const auto& e : training)
            training_points.push_back(e.x);

        TrustBox box;
        bool box_ok = true;
        try {
            box = trust_box(training_points, run.state.mean);
        } catch (const DegenerateBoxError&) {
            box_ok = false;
        }
        audit.trust_box_degenerate = !box_ok;

        if (box_ok) {
            const Vector x_best =
                find_surrogate_minimum(model, box, run.state.mean, ls_budget, ls_rng);
            if (!run.can_spend(2)) {
                run.done = true;
                snapshot_state();
                emit();
                break;
            }
            const double f_mean = run.probe(run.state.mean);
            const double f_best = run.probe(x_best);
            audit.injection_attempted = true;
            ++run.result.injections_attempted;
            if (f_best < f_mean) {
                inject_best(run.state, x_best, run.params, config.sigma_rate);
                audit.injection_accepted = true;
                ++run.result.injections_accepted;
            }
            audit.mean_after_probe = run.state.mean;
            run.checkpoint();
            if (run.done) {
                snapshot_state();
                emit();
                break;
            }
        }

        snapshot_state();

        // Lifespan: generations run on the frozen model without touching the
        // archive or the evaluation budget.
        audit.n_hat_used = controller.n_hat;
        audit.archive_before_surrogate_gens = static_cast<long>(run.archive.size());
        ObjectiveFn surrogate_fn = [&model](const Vector& x) {
            return predict(model, x);
        };
        for (int s = 0; s < controller.n_hat; ++s)
            gen_cma(run.state, run.params, surrogate_fn, nullptr);
        audit.archive_after_surrogate_gens = static_cast<long>(run.archive.size());

        const long gens_before = run.true_gens;
        run.true_generation();
        audit.step5_ran = run.true_gens > gens_before;

        if (!run.done && audit.step5_ran) {
            const auto& entries = run.archive.entries();
            std::vector<std::pair<Vector, double>> fresh;
            fresh.reserve(run.params.lambda);
            for (std::size_t i = entries.size() - run.params.lambda;
                 i < entries.size(); ++i)
                fresh.emplace_back(entries[i].x, entries[i].y);
            const double err = ranking_error(model, fresh);
            controller = update_error(controller, err);
            compute_lifespan(controller);
            audit.measured_err = err;
            audit.err_smoothed_after = controller.err_smoothed;
            audit.n_hat_next = controller.n_hat;
        }
        emit();
    }

    run.finish();
    return run.result;
}

RunResult run_cma_es(const Problem& problem, int dim, const Box& init_box,
                     double sigma0, const SaoConfig& config) {
    Runner run(problem, dim, init_box, sigma0, config);
    while (!run.done)
        run.true_generation();
    run.finish();
    return run.result;
}

double mean_success_evals(const std::vector<RunResult>& runs) {
    long total = 0;
    long count = 0;
    for (const auto& r : runs) {
        if (r.success) {
            total += r.evals_used;
            ++count;
        }
    }
    if (count == 0)
        throw UndefinedSpeedupError("no successful runs");
    return static_cast<double>(total) / static_cast<double>(count);
}

double speedup(const std::vector<RunResult>& baseline,
               const std::vector<RunResult>& candidate) {
    return mean_success_evals(baseline) / mean_success_evals(candidate);
}

std::string run_result_to_json(const std::string& function, int n, const RunResult& r) {
    nlohmann::ordered_json j;
    j["function"] = function;
    j["n"] = n;
    j["seed"] = r.seed;
    j["evals"] = r.evals_used;
    j["best_f"] = r.best_f;
    j["success"] = r.success;
    j["injections_attempted"] = r.injections_attempted;
    j["injections_accepted"] = r.injections_accepted;
    return j.dump();
}

} // namespace cmasao
