#include <doctest.h>

#include "cmasao/controller.hpp"
#include "cmasao/errors.hpp"
#include "cmasao/rng.hpp"

using namespace cmasao;

namespace {

// Independent O(k^2) enumeration with the same tie convention, written
// against the definition rather than the production loop.
double brute_force_discordant(const std::vector<double>& p,
                              const std::vector<double>& t) {
    long bad = 0, total = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (j <= i)
                continue;
            ++total;
            const int sp = p[i] < p[j] ? -1 : (p[i] > p[j] ? 1 : 0);
            const int st = t[i] < t[j] ? -1 : (t[i] > t[j] ? 1 : 0);
            if (sp == 0 && st == 0)
                continue;
            if (sp != st)
                ++bad;
        }
    }
    return static_cast<double>(bad) / static_cast<double>(total);
}

} // namespace

TEST_CASE("discordant_fraction hand cases") {
    CHECK(discordant_fraction({1, 2, 3}, {1, 2, 3}) == 0.0);
    CHECK(discordant_fraction({1, 2, 3}, {3, 2, 1}) == 1.0);
    CHECK(discordant_fraction({3, 1, 2}, {1, 2, 3}) ==
          doctest::Approx(2.0 / 3.0));

    // Tied in exactly one ordering counts discordant; tied in both, concordant.
    CHECK(discordant_fraction({1, 1}, {1, 2}) == 1.0);
    CHECK(discordant_fraction({1, 1}, {2, 2}) == 0.0);
    CHECK(discordant_fraction({1, 2}, {5, 5}) == 1.0);
}

TEST_CASE("discordant_fraction input validation") {
    CHECK_THROWS_AS(discordant_fraction({1, 2}, {1, 2, 3}), InvalidDimensionError);
    CHECK_THROWS_AS(discordant_fraction({1}, {1}), InsufficientTestPointsError);
    CHECK_THROWS_AS(discordant_fraction({}, {}), InsufficientTestPointsError);
}

TEST_CASE("discordant_fraction agrees with an independent enumeration") {
    Rng rng(41);
    for (int trial = 0; trial < 300; ++trial) {
        const int k = 2 + static_cast<int>(rng.uniform(0.0, 7.0));
        std::vector<double> p(k), t(k);
        for (int i = 0; i < k; ++i) {
            // Coarse grid so ties actually occur.
            p[i] = std::floor(rng.uniform(0.0, 4.0));
            t[i] = std::floor(rng.uniform(0.0, 4.0));
        }
        CHECK(discordant_fraction(p, t) == brute_force_discordant(p, t));
    }
}

TEST_CASE("ranking_error evaluates the model on the test points") {
    Matrix pts(3, 1);
    pts << -1.0, 0.0, 1.0;
    Vector vals(3);
    vals << 1.0, 0.0, 1.0;
    const auto model = fit_rbf(pts, vals, RbfKernel::cubic);

    // At the nodes the interpolant reproduces the truth: perfect ranking.
    std::vector<std::pair<Vector, double>> nodes = {
        {Vector::Constant(1, -1.0), 1.0},
        {Vector::Constant(1, 0.0), 0.0},
        {Vector::Constant(1, 1.0), 1.0},
    };
    CHECK(ranking_error(model, nodes) == 0.0);

    // Flip the truth ordering: every decisive pair is now discordant.
    std::vector<std::pair<Vector, double>> flipped = {
        {Vector::Constant(1, -1.0), 0.0},
        {Vector::Constant(1, 0.0), 1.0},
    };
    CHECK(ranking_error(model, flipped) == 1.0);

    std::vector<std::pair<Vector, double>> lone = {{Vector::Zero(1), 0.0}};
    CHECK_THROWS_AS(ranking_error(model, lone), InsufficientTestPointsError);
}

TEST_CASE("error smoothing and initial state") {
    SurrogateController ctrl;
    CHECK(ctrl.err_smoothed == 0.5);
    CHECK(ctrl.tau_err == 0.45);
    CHECK(ctrl.beta_err == 0.2);
    CHECK(ctrl.n_hat == 0);
    CHECK(ctrl.n_hat_max == 20);

    ctrl = update_error(ctrl, 0.0);
    CHECK(ctrl.err_smoothed == doctest::Approx(0.4).epsilon(1e-12));
    ctrl = update_error(ctrl, 1.0);
    CHECK(ctrl.err_smoothed == doctest::Approx(0.52).epsilon(1e-12));

    CHECK_THROWS_AS(update_error(ctrl, -0.1), DomainError);
    CHECK_THROWS_AS(update_error(ctrl, 1.1), DomainError);
}

TEST_CASE("lifespan anchors") {
    SurrogateController ctrl;

    ctrl.err_smoothed = 0.0;
    CHECK(compute_lifespan(ctrl) == 20);
    ctrl.err_smoothed = 0.45;
    CHECK(compute_lifespan(ctrl) == 0);
    ctrl.err_smoothed = 0.225;
    CHECK(compute_lifespan(ctrl) == 10);
    ctrl.err_smoothed = 0.05;
    CHECK(compute_lifespan(ctrl) == 17); // floor(17.78)
    ctrl.err_smoothed = 0.9; // worse than tau: clamped at zero
    CHECK(compute_lifespan(ctrl) == 0);
    CHECK(ctrl.n_hat == 0);

    // A fresh controller starts pessimistic: E = 0.5 > tau means no
    // surrogate-only generations until evidence accumulates.
    SurrogateController fresh;
    CHECK(compute_lifespan(fresh) == 0);
}
