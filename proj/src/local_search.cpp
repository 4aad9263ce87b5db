#include "cmasao/local_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmasao/errors.hpp"

namespace cmasao {

TrustBox trust_box(const std::vector<Vector>& training_points, const Vector& x_mean) {
    if (training_points.empty())
        throw EmptyTrainingSetError("trust box needs training points");
    const Eigen::Index n = x_mean.size();

    Vector lo = training_points.front();
    Vector hi = training_points.front();
    for (const auto& p : training_points) {
        if (p.size() != n)
            throw InvalidDimensionError("trust box: dimension mismatch");
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double xi = 0.1 * (hi - lo).minCoeff();
    if (!(xi > 0.0))
        throw DegenerateBoxError("training set has zero spread on some axis");

    TrustBox box;
    box.lower = x_mean.array() - xi / 2.0;
    box.upper = x_mean.array() + xi / 2.0;
    box.xi = xi;
    return box;
}

Vector minimize_in_box(const std::function<double(const Vector&)>& f,
                       const std::function<Vector(const Vector&)>& grad,
                       const TrustBox& box, const Vector& x_mean, long budget,
                       Rng& rng) {
    if (budget < 5)
        throw InvalidBudgetError("local search budget must be at least 5");
    const Eigen::Index n = x_mean.size();

    auto project = [&box](Vector x) -> Vector {
        return x.cwiseMax(box.lower).cwiseMin(box.upper);
    };

    long evals = 0;
    auto eval = [&](const Vector& x) {
        ++evals;
        return f(x);
    };

    std::vector<Vector> starts;
    starts.push_back(project(x_mean));
    for (int s = 0; s < 4; ++s) {
        Vector x(n);
        for (Eigen::Index d = 0; d < n; ++d)
            x(d) = rng.uniform(box.lower(d), box.upper(d));
        starts.push_back(std::move(x));
    }

    const double step_tol = 1e-10 * box.xi;
    Vector x_best = starts.front();
    double f_best = std::numeric_limits<double>::infinity();

    for (const auto& start : starts) {
        if (evals >= budget)
            break;
        Vector x = start;
        double fx = eval(x);
        if (fx < f_best) {
            f_best = fx;
            x_best = x;
        }

        while (evals < budget) {
            const Vector g = grad(x);
            if (!g.allFinite())
                break;
            // Stationarity via the projected-gradient mapping.
            if ((x - project(x - g)).norm() < 1e-8)
                break;

            const double gnorm = g.norm();
            double step = box.xi / gnorm; // first trial moves ~one box width
            bool moved = false;
            while (evals < budget) {
                const Vector x_new = project(x - step * g);
                if ((x_new - x).norm() < step_tol)
                    break;
                const double f_new = eval(x_new);
                if (f_new <= fx + 1e-4 * g.dot(x_new - x)) {
                    x = x_new;
                    fx = f_new;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved)
                break;
            if (fx < f_best) {
                f_best = fx;
                x_best = x;
            }
        }
    }
    return x_best;
}

Vector find_surrogate_minimum(const RbfModel& model, const TrustBox& box,
                              const Vector& x_mean, long budget, Rng& rng) {
    auto f = [&model](const Vector& x) { return predict(model, x); };
    auto g = [&model](const Vector& x) { return predict_gradient(model, x); };
    return minimize_in_box(f, g, box, x_mean, budget, rng);
}

} // namespace cmasao
