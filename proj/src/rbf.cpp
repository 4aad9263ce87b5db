#include "cmasao/rbf.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "cmasao/errors.hpp"

namespace cmasao {

double kernel_phi(RbfKernel k, double r) {
    switch (k) {
    case RbfKernel::cubic:
        return r * r * r;
    case RbfKernel::linear:
        return r;
    case RbfKernel::thin_plate_spline:
        return r > 0.0 ? r * r * std::log(r) : 0.0;
    }
    return 0.0;
}

double kernel_dphi_over_r(RbfKernel k, double r) {
    switch (k) {
    case RbfKernel::cubic:
        return 3.0 * r;
    case RbfKernel::linear:
        return 1.0 / r;
    case RbfKernel::thin_plate_spline:
        return 2.0 * std::log(r) + 1.0;
    }
    return 0.0;
}

std::string kernel_name(RbfKernel k) {
    switch (k) {
    case RbfKernel::cubic:
        return "cubic";
    case RbfKernel::linear:
        return "linear";
    case RbfKernel::thin_plate_spline:
        return "tps";
    }
    return "?";
}

RbfKernel kernel_from_name(const std::string& name) {
    if (name == "cubic")
        return RbfKernel::cubic;
    if (name == "linear")
        return RbfKernel::linear;
    if (name == "tps" || name == "thin-plate-spline" || name == "thin_plate_spline")
        return RbfKernel::thin_plate_spline;
    throw DomainError("unknown kernel '" + name + "' (valid: cubic, linear, tps)");
}

long training_set_size(int dim) {
    if (dim < 1)
        throw InvalidDimensionError("dimension must be >= 1");
    return static_cast<long>(
        std::floor(40.0 + 3.0 * std::pow(static_cast<double>(dim), 1.7)));
}

std::vector<Archive::Entry> select_training_set(const Archive& archive, int dim) {
    if (archive.empty())
        throw EmptyTrainingSetError("archive is empty");

    const long target = training_set_size(dim);
    const auto& entries = archive.entries();

    // Newest first, skipping near-exact duplicates of already-kept points.
    std::vector<const Archive::Entry*> kept;
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
        bool duplicate = false;
        for (const auto* k : kept) {
            if (((it->x - k->x).cwiseAbs().maxCoeff()) <= 1e-12) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) {
            kept.push_back(&*it);
            if (static_cast<long>(kept.size()) == target)
                break;
        }
    }

    std::vector<Archive::Entry> result;
    result.reserve(kept.size());
    for (auto it = kept.rbegin(); it != kept.rend(); ++it)
        result.push_back(**it);
    return result;
}

namespace {

Matrix kernel_matrix(RbfKernel kernel, const Matrix& points) {
    const Eigen::Index k = points.rows();
    Matrix phi(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        phi(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < k; ++j) {
            const double r = (points.row(i) - points.row(j)).norm();
            const double v = kernel_phi(kernel, r);
            phi(i, j) = v;
            phi(j, i) = v;
        }
    }
    return phi;
}

// Tikhonov scale: the literal diagonal of Phi is identically zero for these
// kernels, so the mean absolute entry stands in for the matrix magnitude.
double regularization_scale(const Matrix& phi) {
    const double mean_abs = phi.cwiseAbs().mean();
    return mean_abs > 0.0 ? mean_abs : 1.0;
}

struct SolveOutcome {
    Vector solution;
    bool regularized = false;
};

// Dense solve with an rcond gate; on failure retry with Phi shifted by
// 1e-8 * scale on its diagonal.
SolveOutcome solve_saddle(Matrix system, const Vector& rhs, Eigen::Index phi_size,
                          double reg_scale) {
    Eigen::PartialPivLU<Matrix> lu(system);
    Vector sol = lu.solve(rhs);
    if (lu.rcond() >= 1e-12 && sol.allFinite())
        return {std::move(sol), false};

    system.topLeftCorner(phi_size, phi_size).diagonal().array() += 1e-8 * reg_scale;
    Eigen::PartialPivLU<Matrix> lu2(system);
    return {lu2.solve(rhs), true};
}

} // namespace

RbfModel fit_rbf(const Matrix& points, const Vector& values, RbfKernel kernel) {
    const Eigen::Index k = points.rows();
    const Eigen::Index n = points.cols();
    if (k != values.size())
        throw InvalidDimensionError("points/values size mismatch");
    if (k < n + 2)
        throw InsufficientPointsError("need at least N+2 training points");
    if (!values.allFinite())
        throw EvaluationError("training values must be finite", Vector());

    RbfModel model;
    model.kernel = kernel;
    model.centers = points;
    model.train_size = static_cast<int>(k);
    model.transform = EncodingTransform::identity(static_cast<int>(n));

    const Matrix phi = kernel_matrix(kernel, points);
    const double reg_scale = regularization_scale(phi);

    Matrix tail(k, n + 1);
    tail.col(0).setOnes();
    tail.rightCols(n) = points;

    const bool degenerate = Eigen::ColPivHouseholderQR<Matrix>(tail).rank() < n + 1;
    if (degenerate) {
        // No unisolvent tail possible; pure-RBF fit on the kernel block.
        auto out = solve_saddle(phi, values, k, reg_scale);
        model.rbf_weights = out.solution;
        model.poly_coeffs = Vector::Zero(n + 1);
        model.regularized = out.regularized;
        model.tail_free = true;
        return model;
    }

    const Eigen::Index m = k + n + 1;
    Matrix system = Matrix::Zero(m, m);
    system.topLeftCorner(k, k) = phi;
    system.topRightCorner(k, n + 1) = tail;
    system.bottomLeftCorner(n + 1, k) = tail.transpose();
    Vector rhs = Vector::Zero(m);
    rhs.head(k) = values;

    auto out = solve_saddle(std::move(system), rhs, k, reg_scale);
    model.rbf_weights = out.solution.head(k);
    model.poly_coeffs = out.solution.tail(n + 1);
    model.regularized = out.regularized;
    return model;
}

RbfModel build_surrogate(const Archive& archive, CmaState& state, RbfKernel kernel) {
    const int n = static_cast<int>(state.mean.size());
    auto training = select_training_set(archive, n);
    if (static_cast<Eigen::Index>(training.size()) < n + 2)
        throw InsufficientPointsError("archive holds fewer than N+2 distinct points");

    if (!state.eig.fresh)
        refresh_eigen(state);
    EncodingTransform transform{state.mean, state.eig.inv_sqrt, state.generation};

    Matrix encoded(training.size(), n);
    Vector values(training.size());
    for (std::size_t i = 0; i < training.size(); ++i) {
        encoded.row(i) = encode(transform, training[i].x).transpose();
        values(i) = training[i].y;
    }

    RbfModel model = fit_rbf(encoded, values, kernel);
    model.transform = std::move(transform);
    return model;
}

double predict(const RbfModel& model, const Vector& x) {
    if (!x.allFinite())
        throw EvaluationError("predict: non-finite input", x);
    const Vector xe = encode(model.transform, x);
    double acc = model.poly_coeffs(0) + model.poly_coeffs.tail(xe.size()).dot(xe);
    for (Eigen::Index i = 0; i < model.centers.rows(); ++i) {
        const double r = (xe.transpose() - model.centers.row(i)).norm();
        acc += model.rbf_weights(i) * kernel_phi(model.kernel, r);
    }
    return acc;
}

Vector predict_gradient(const RbfModel& model, const Vector& x, bool* at_kink) {
    if (at_kink)
        *at_kink = false;
    const Vector xe = encode(model.transform, x);
    Vector g = model.poly_coeffs.tail(xe.size());
    for (Eigen::Index i = 0; i < model.centers.rows(); ++i) {
        const Vector diff = xe - model.centers.row(i).transpose();
        const double r = diff.norm();
        if (r == 0.0) {
            // Cubic and TPS terms vanish in the limit; the linear kernel has
            // a kink, so its term is dropped (subgradient).
            if (model.kernel == RbfKernel::linear && at_kink)
                *at_kink = true;
            continue;
        }
        g += model.rbf_weights(i) * kernel_dphi_over_r(model.kernel, r) * diff;
    }
    return model.transform.inv_sqrt.transpose() * g;
}

} // namespace cmasao
