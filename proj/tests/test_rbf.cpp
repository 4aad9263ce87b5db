#include <doctest.h>

#include <cmath>

#include "cmasao/errors.hpp"
#include "cmasao/rbf.hpp"

using namespace cmasao;

namespace {

Matrix random_points(Rng& rng, int k, int n, double lo = -2.0, double hi = 2.0) {
    Matrix pts(k, n);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < n; ++j)
            pts(i, j) = rng.uniform(lo, hi);
    return pts;
}

// Relative gradient agreement against central differences.
void check_gradient_fd(const RbfModel& model, const Vector& x, double h = 1e-5) {
    const Vector g = predict_gradient(model, x);
    Vector fd(x.size());
    for (int i = 0; i < x.size(); ++i) {
        Vector hi = x, lo = x;
        hi(i) += h;
        lo(i) -= h;
        fd(i) = (predict(model, hi) - predict(model, lo)) / (2.0 * h);
    }
    CHECK((g - fd).norm() <= 1e-4 * std::max(1.0, fd.norm()));
}

} // namespace

TEST_CASE("kernel values and radial derivative factors") {
    CHECK(kernel_phi(RbfKernel::cubic, 2.0) == 8.0);
    CHECK(kernel_phi(RbfKernel::linear, 2.0) == 2.0);
    CHECK(kernel_phi(RbfKernel::thin_plate_spline, 2.0) ==
          doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-15));
    for (auto k : {RbfKernel::cubic, RbfKernel::linear, RbfKernel::thin_plate_spline})
        CHECK(kernel_phi(k, 0.0) == 0.0); // TPS by continuity
    CHECK(kernel_phi(RbfKernel::thin_plate_spline, 1.0) == 0.0);
    CHECK(kernel_phi(RbfKernel::thin_plate_spline, 0.5) < 0.0);

    CHECK(kernel_dphi_over_r(RbfKernel::cubic, 2.0) == 6.0);
    CHECK(kernel_dphi_over_r(RbfKernel::linear, 2.0) == 0.5);
    CHECK(kernel_dphi_over_r(RbfKernel::thin_plate_spline, 2.0) ==
          doctest::Approx(2.0 * std::log(2.0) + 1.0).epsilon(1e-15));
}

TEST_CASE("kernel names round trip") {
    for (auto k : {RbfKernel::cubic, RbfKernel::linear, RbfKernel::thin_plate_spline})
        CHECK(kernel_from_name(kernel_name(k)) == k);
    CHECK(kernel_from_name("thin_plate_spline") == RbfKernel::thin_plate_spline);
    CHECK_THROWS_AS(kernel_from_name("gaussian"), DomainError);
}

TEST_CASE("training set size formula") {
    CHECK(training_set_size(1) == 43);
    CHECK(training_set_size(2) == 49);
    CHECK(training_set_size(10) == 190);
    CHECK_THROWS_AS(training_set_size(0), InvalidDimensionError);
}

TEST_CASE("select_training_set keeps the newest distinct points") {
    Archive small;
    for (int i = 0; i < 30; ++i)
        small.add(Vector::Constant(2, static_cast<double>(i)), i, 0);
    CHECK(select_training_set(small, 2).size() == 30);

    Archive big;
    for (int i = 0; i < 500; ++i)
        big.add(Vector::Constant(2, static_cast<double>(i)), i, i / 6);
    const auto sel = select_training_set(big, 2);
    REQUIRE(sel.size() == 49);
    CHECK(sel.front().eval_index == 451); // the newest 49, order preserved
    CHECK(sel.back().eval_index == 499);
    for (std::size_t i = 0; i + 1 < sel.size(); ++i)
        CHECK(sel[i].eval_index < sel[i + 1].eval_index);
}

TEST_CASE("select_training_set dedup keeps the newest duplicate") {
    Archive a;
    Vector x(2);
    x << 1.0, 2.0;
    a.add(x, 10.0, 0);
    a.add(Vector::Zero(2), 5.0, 0);
    a.add(x, 11.0, 1); // same point re-evaluated later
    const auto sel = select_training_set(a, 2);
    REQUIRE(sel.size() == 2);
    CHECK(sel.back().y == 11.0);
    CHECK(sel.front().y == 5.0);

    Archive empty;
    CHECK_THROWS_AS(select_training_set(empty, 2), EmptyTrainingSetError);
}

TEST_CASE("cubic fit in one dimension matches the hand-solved system") {
    Matrix pts(3, 1);
    pts << -1.0, 0.0, 1.0;
    Vector vals(3);
    vals << 1.0, 0.0, 1.0;
    const auto model = fit_rbf(pts, vals, RbfKernel::cubic);

    CHECK_FALSE(model.regularized);
    CHECK_FALSE(model.tail_free);
    // Saddle system solution: weights {1/4, -1/2, 1/4}, tail {-1/2, 0}.
    CHECK(model.rbf_weights(0) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(model.rbf_weights(1) == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(model.rbf_weights(2) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(model.poly_coeffs(0) == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(model.poly_coeffs(1) == doctest::Approx(0.0).epsilon(1e-10));

    for (int i = 0; i < 3; ++i)
        CHECK(predict(model, pts.row(i).transpose()) ==
              doctest::Approx(vals(i)).epsilon(1e-8));
    CHECK(predict(model, Vector::Constant(1, 0.5)) ==
          doctest::Approx(0.3125).epsilon(1e-10));

    // Symmetric data: zero slope at the center.
    CHECK(predict_gradient(model, Vector::Zero(1)).norm() < 1e-10);
}

TEST_CASE("every kernel reproduces affine functions exactly") {
    Rng rng(31);
    const int n = 3;
    const Matrix pts = random_points(rng, n + 5, n);
    Vector vals(pts.rows());
    for (int i = 0; i < pts.rows(); ++i)
        vals(i) = 2.0 * pts(i, 0) + 1.0;

    for (auto kernel :
         {RbfKernel::cubic, RbfKernel::linear, RbfKernel::thin_plate_spline}) {
        const auto model = fit_rbf(pts, vals, kernel);
        CHECK(model.rbf_weights.cwiseAbs().maxCoeff() < 1e-6);
        for (int probe = 0; probe < 100; ++probe) {
            Vector x(n);
            for (int j = 0; j < n; ++j)
                x(j) = rng.uniform(-3.0, 3.0);
            CHECK(predict(model, x) ==
                  doctest::Approx(2.0 * x(0) + 1.0).epsilon(1e-6));
        }
        Vector expect_grad = Vector::Zero(n);
        expect_grad(0) = 2.0;
        CHECK((predict_gradient(model, Vector::Zero(n)) - expect_grad).norm() < 1e-6);
    }
}

TEST_CASE("interpolation exactness and moment conditions on random data") {
    Rng rng(32);
    const int n = 2, k = 20;
    const Matrix pts = random_points(rng, k, n);
    Vector vals(k);
    for (int i = 0; i < k; ++i)
        vals(i) = std::sin(pts(i, 0)) + pts(i, 1) * pts(i, 1);

    for (auto kernel :
         {RbfKernel::cubic, RbfKernel::linear, RbfKernel::thin_plate_spline}) {
        const auto model = fit_rbf(pts, vals, kernel);
        REQUIRE_FALSE(model.regularized);
        for (int i = 0; i < k; ++i)
            CHECK(predict(model, pts.row(i).transpose()) ==
                  doctest::Approx(vals(i)).epsilon(1e-6));

        CHECK(std::abs(model.rbf_weights.sum()) < 1e-6);
        const Vector moment = model.centers.transpose() * model.rbf_weights;
        CHECK(moment.cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("degenerate fits stay usable") {
    SUBCASE("too few points") {
        Matrix pts = Matrix::Identity(3, 2); // N+1 = 3 points in 2D
        Vector vals = Vector::Ones(3);
        CHECK_THROWS_AS(fit_rbf(pts, vals, RbfKernel::cubic),
                        InsufficientPointsError);
    }

    SUBCASE("coincident points trigger the regularized fallback") {
        Rng rng(33);
        Matrix pts = random_points(rng, 6, 2);
        pts.row(5) = pts.row(0); // exact duplicate slipped past dedup
        Vector vals(6);
        for (int i = 0; i < 6; ++i)
            vals(i) = static_cast<double>(i);
        const auto model = fit_rbf(pts, vals, RbfKernel::cubic);
        CHECK(model.regularized);
        CHECK(std::isfinite(predict(model, Vector::Zero(2))));
    }

    SUBCASE("collinear geometry drops the polynomial tail") {
        const int k = 6;
        Matrix pts(k, 2);
        for (int i = 0; i < k; ++i) {
            pts(i, 0) = static_cast<double>(i);
            pts(i, 1) = 2.0 * i; // all on a line: no unisolvent tail
        }
        Vector vals(k);
        for (int i = 0; i < k; ++i)
            vals(i) = std::cos(static_cast<double>(i));
        const auto model = fit_rbf(pts, vals, RbfKernel::cubic);
        CHECK(model.tail_free);
        for (int i = 0; i < k; ++i)
            CHECK(std::isfinite(predict(model, pts.row(i).transpose())));
    }
}

TEST_CASE("build_surrogate with identity encoding equals the raw fit") {
    Rng rng(34);
    const int n = 2;
    Archive archive;
    for (int i = 0; i < 12; ++i) {
        Vector x(n);
        for (int j = 0; j < n; ++j)
            x(j) = rng.uniform(-2.0, 2.0);
        archive.add(x, x.squaredNorm(), i);
    }

    auto params = default_params(n);
    Box box;
    box.lower = Vector::Constant(n, -2.0);
    box.upper = Vector::Constant(n, 2.0);
    auto state = init_cma(params, box, 1.0, 1);
    state.mean = Vector::Zero(n); // identity C from init, centered
    const auto via_state = build_surrogate(archive, state, RbfKernel::cubic);

    const auto sel = select_training_set(archive, n);
    Matrix pts(sel.size(), n);
    Vector vals(sel.size());
    for (std::size_t i = 0; i < sel.size(); ++i) {
        pts.row(i) = sel[i].x.transpose();
        vals(i) = sel[i].y;
    }
    const auto raw = fit_rbf(pts, vals, RbfKernel::cubic);

    for (int probe = 0; probe < 50; ++probe) {
        Vector x(n);
        for (int j = 0; j < n; ++j)
            x(j) = rng.uniform(-2.0, 2.0);
        CHECK(predict(via_state, x) == doctest::Approx(predict(raw, x)).epsilon(1e-10));
    }
}

TEST_CASE("fitting encoded equals encoding then fitting") {
    Rng rng(35);
    const int n = 2;
    Matrix a(n, n);
    a << 1.2, 0.4, -0.3, 0.9;
    const Matrix cov = a * a.transpose() + 0.5 * Matrix::Identity(n, n);
    Vector mean(n);
    mean << 0.7, -1.1;

    Archive archive;
    for (int i = 0; i < 15; ++i) {
        Vector x(n);
        for (int j = 0; j < n; ++j)
            x(j) = rng.uniform(-2.0, 2.0);
        archive.add(x, std::sin(x(0)) + x(1), i);
    }

    auto params = default_params(n);
    Box box;
    box.lower = Vector::Constant(n, -2.0);
    box.upper = Vector::Constant(n, 2.0);
    auto state = init_cma(params, box, 1.0, 2);
    state.mean = mean;
    state.cov = cov;
    state.eig.fresh = false;
    const auto model = build_surrogate(archive, state, RbfKernel::cubic);
    CHECK(model.transform.mean == mean);

    // Same fit done on pre-encoded points with the identity transform.
    const auto sel = select_training_set(archive, n);
    Matrix enc(sel.size(), n);
    Vector vals(sel.size());
    for (std::size_t i = 0; i < sel.size(); ++i) {
        enc.row(i) = encode(model.transform, sel[i].x).transpose();
        vals(i) = sel[i].y;
    }
    const auto pre = fit_rbf(enc, vals, RbfKernel::cubic);

    for (int probe = 0; probe < 50; ++probe) {
        Vector x(n);
        for (int j = 0; j < n; ++j)
            x(j) = rng.uniform(-2.0, 2.0);
        CHECK(predict(model, x) ==
              doctest::Approx(predict(pre, encode(model.transform, x))).epsilon(1e-8));
    }
}

TEST_CASE("build_surrogate boundary: N+1 distinct points is not enough") {
    Archive archive;
    archive.add(Vector::Zero(2), 0.0, 0);
    archive.add(Vector::Ones(2), 2.0, 0);
    Vector third(2);
    third << 1.0, 0.0;
    archive.add(third, 1.0, 0);

    auto params = default_params(2);
    Box box;
    box.lower = Vector::Constant(2, -2.0);
    box.upper = Vector::Constant(2, 2.0);
    auto state = init_cma(params, box, 1.0, 3);
    CHECK_THROWS_AS(build_surrogate(archive, state, RbfKernel::cubic),
                    InsufficientPointsError);
}

TEST_CASE("predict is bitwise deterministic") {
    Rng rng(36);
    const Matrix pts = random_points(rng, 10, 2);
    Vector vals(10);
    for (int i = 0; i < 10; ++i)
        vals(i) = pts.row(i).squaredNorm();
    const auto model = fit_rbf(pts, vals, RbfKernel::thin_plate_spline);
    Vector x(2);
    x << 0.3, -0.8;
    CHECK(predict(model, x) == predict(model, x));
}

TEST_CASE("analytic gradients match central differences") {
    Rng rng(37);
    const int n = 2;
    const Matrix pts = random_points(rng, 12, n);
    Vector vals(12);
    for (int i = 0; i < 12; ++i)
        vals(i) = std::sin(pts(i, 0)) * std::cos(pts(i, 1));

    for (auto kernel :
         {RbfKernel::cubic, RbfKernel::linear, RbfKernel::thin_plate_spline}) {
        const auto model = fit_rbf(pts, vals, kernel);
        int done = 0;
        while (done < 100) {
            Vector x(n);
            for (int j = 0; j < n; ++j)
                x(j) = rng.uniform(-2.0, 2.0);
            // Keep probes away from centers: kernels are non-smooth there.
            double min_dist = 1e300;
            for (int i = 0; i < pts.rows(); ++i)
                min_dist = std::min(min_dist,
                                    (pts.row(i).transpose() - x).norm());
            if (min_dist < 1e-2)
                continue;
            check_gradient_fd(model, x);
            ++done;
        }
    }
}

TEST_CASE("linear kernel flags the kink at a center") {
    Matrix pts(4, 2);
    pts << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0;
    Vector vals(4);
    vals << 0.0, 1.0, 1.0, 2.0;
    const auto model = fit_rbf(pts, vals, RbfKernel::linear);

    bool at_kink = false;
    const Vector g = predict_gradient(model, Vector::Zero(2), &at_kink);
    CHECK(at_kink);
    CHECK(std::isfinite(g.norm()));

    at_kink = false;
    Vector away(2);
    away << 0.5, 0.25;
    predict_gradient(model, away, &at_kink);
    CHECK_FALSE(at_kink);
}
