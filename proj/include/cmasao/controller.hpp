#pragma once

#include <utility>
#include <vector>

#include "cmasao/rbf.hpp"

namespace cmasao {

/// Surrogate quality controller: smoothed ranking error and the lifespan
/// n_hat of the current model.
struct SurrogateController {
    double err_smoothed = 0.5;
    double tau_err = 0.45;
    double beta_err = 0.2;
    int n_hat = 0;
    int n_hat_max = 20;
};

/// Normalized discordant-pair count between two value sequences. A pair tied
/// in exactly one ordering counts discordant; tied in both counts concordant.
double discordant_fraction(const std::vector<double>& predicted,
                           const std::vector<double>& truth);

/// Ranking error of the model on test pairs (x, true_y): the fraction of
/// point pairs ordered differently by prediction and truth. 0 = perfect,
/// 1 = fully reversed.
double ranking_error(const RbfModel& model,
                     const std::vector<std::pair<Vector, double>>& test_points);

/// Exponential smoothing: err <- (1-beta)*err + beta*err_new.
SurrogateController update_error(SurrogateController ctrl, double err_new);

/// Lifespan from the smoothed error, clamped to [0, n_hat_max]; stores the
/// result in ctrl.n_hat and returns it.
int compute_lifespan(SurrogateController& ctrl);

} // namespace cmasao
