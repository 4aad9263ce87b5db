#include "cmasao/controller.hpp"

#include <algorithm>
#include <cmath>

#include "cmasao/errors.hpp"

namespace cmasao {

double discordant_fraction(const std::vector<double>& predictions,
                           const std::vector<double>& truths) {
    if (predictions.size() != truths.size())
        throw InvalidDimensionError("ranking error: size mismatch");
    const std::size_t k = predictions.size();
    if (k < 2)
        throw InsufficientTestPointsError("ranking error needs at least 2 points");

    long discordant = 0;
    long total = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            ++total;
            const double dp = predictions[i] - predictions[j];
            const double dt = truths[i] - truths[j];
            if (dp == 0.0 && dt == 0.0)
                continue; // tied under both orderings: concordant
            if (dp == 0.0 || dt == 0.0 || (dp > 0.0) != (dt > 0.0))
                ++discordant;
        }
    }
    return static_cast<double>(discordant) / static_cast<double>(total);
}

double ranking_error(const RbfModel& model,
                     const std::vector<std::pair<Vector, double>>& test_points) {
    std::vector<double> preds, truths;
    preds.reserve(test_points.size());
    truths.reserve(test_points.size());
    for (const auto& [x, y] : test_points) {
        preds.push_back(predict(model, x));
        truths.push_back(y);
    }
    return discordant_fraction(preds, truths);
}

SurrogateController update_error(SurrogateController ctrl, double err_new) {
    if (!(err_new >= 0.0 && err_new <= 1.0))
        throw DomainError("ranking error must lie in [0, 1]");
    ctrl.err_smoothed =
        (1.0 - ctrl.beta_err) * ctrl.err_smoothed + ctrl.beta_err * err_new;
    return ctrl;
}

int compute_lifespan(SurrogateController& ctrl) {
    const double raw = std::floor((ctrl.tau_err - ctrl.err_smoothed) / ctrl.tau_err *
                                  static_cast<double>(ctrl.n_hat_max));
    const long clamped =
        std::clamp(static_cast<long>(raw), 0L, static_cast<long>(ctrl.n_hat_max));
    ctrl.n_hat = static_cast<int>(clamped);
    return ctrl.n_hat;
}

} // namespace cmasao
