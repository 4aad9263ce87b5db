#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "cmasao/controller.hpp"
#include "cmasao/local_search.hpp"

namespace cmasao {

/// Which rate scales the log step-size change in the injection update.
enum class SigmaRate {
    as_printed,   // c_covn / d_nsigma
    csa_standard, // c_nsigma / d_nsigma
};

struct SaoConfig {
    int g_start = 5;                    // warm-up generations on the true objective
    int n_hat_max = 20;
    double tau_err = 0.45;
    double beta_err = 0.2;
    RbfKernel kernel = RbfKernel::cubic;
    double target_f = 1e-10;
    std::optional<long> max_evals;      // default 1000 * N^2
    std::optional<long> ls_budget;      // default 100 * N surrogate evaluations
    std::uint64_t seed = 0;
    SigmaRate sigma_rate = SigmaRate::as_printed;
    bool stagnation_guard = true;       // stop after 50*N generations without 1e-14 progress
};

/// Objective as the runner sees it. `measure` is the counted evaluator (may
/// be noisy); `progress`, when set, is the uncounted noiseless value used
/// only for the termination check and best-f bookkeeping.
struct Problem {
    ObjectiveFn measure;
    ObjectiveFn progress;
};

struct RunResult {
    long evals_used = 0;
    double best_f = std::numeric_limits<double>::infinity();
    bool success = false;
    std::vector<std::pair<long, double>> history; // (eval_count, best-so-far f)
    int injections_attempted = 0;
    int injections_accepted = 0;
    std::uint64_t seed = 0;
};

/// Learning rates of the injection update with effective mass 1.
struct InjectionRates {
    double c_sigma_inj = 0.0; // conjugate-path rate
    double c_c_inj = 0.0;     // rank-one path rate
    double c_cov_inj = 0.0;   // covariance rate
    double d_sigma_inj = 0.0; // step-size damping
};

InjectionRates injection_rates(int dim);

/// Move the mean to x_best and update paths, covariance and step size along
/// the displacement. Caller has verified f(x_best) < f(mean).
void inject_best(CmaState& state, const Vector& x_best, const CmaParams& params,
                 SigmaRate sigma_rate = SigmaRate::as_printed);

/// Per-iteration audit record for tests and studies.
struct IterationAudit {
    long archive_before_surrogate_gens = 0;
    long archive_after_surrogate_gens = 0;
    int n_hat_used = 0;
    bool trust_box_degenerate = false;
    bool injection_attempted = false;
    bool injection_accepted = false;
    Vector mean_before_probe;
    Vector mean_after_probe;
    double min_cov_eigenvalue = 0.0; // after the probe/injection step
    double sigma = 0.0;
    bool step5_ran = false;          // the single true generation of the iteration
    double measured_err = std::numeric_limits<double>::quiet_NaN();
    double err_smoothed_after = std::numeric_limits<double>::quiet_NaN();
    int n_hat_next = 0;
};

struct RunHooks {
    std::function<void(const IterationAudit&)> on_iteration;
};

RunResult run_cma_sao(const Problem& problem, int dim, const Box& init_box,
                      double sigma0, const SaoConfig& config,
                      const RunHooks* hooks = nullptr);

/// Plain CMA-ES baseline with the same termination criteria.
RunResult run_cma_es(const Problem& problem, int dim, const Box& init_box,
                     double sigma0, const SaoConfig& config);

/// Mean true-evaluation count over successful runs.
double mean_success_evals(const std::vector<RunResult>& runs);

/// Baseline mean evals over candidate mean evals, successes only.
double speedup(const std::vector<RunResult>& baseline,
               const std::vector<RunResult>& candidate);

/// JSON line with fields exactly
/// {function, n, seed, evals, best_f, success, injections_attempted,
///  injections_accepted}.
std::string run_result_to_json(const std::string& function, int n, const RunResult& r);

} // namespace cmasao
