#include "cmasao/encoding.hpp"

#include <Eigen/Dense>

#include "cmasao/errors.hpp"

namespace cmasao {

namespace {

// Shared eigendecomposition with flooring; power = -1 gives C^{-1/2},
// power = +1 gives C^{1/2}.
Matrix sym_root(const Matrix& cov, int power) {
    if (cov.rows() != cov.cols())
        throw InvalidMatrixError("covariance must be square");
    const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    if (((cov - cov.transpose()).cwiseAbs().maxCoeff()) > 1e-8 * scale)
        throw InvalidMatrixError("covariance not symmetric");

    const Matrix sym = (cov + cov.transpose()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success)
        throw InvalidMatrixError("eigendecomposition failed");

    const double floor = eigen_floor(sym);
    Vector roots = solver.eigenvalues().cwiseMax(floor).cwiseSqrt();
    if (power < 0)
        roots = roots.cwiseInverse();
    Matrix result = solver.eigenvectors() * roots.asDiagonal() *
                    solver.eigenvectors().transpose();
    return ((result + result.transpose()) * 0.5).eval();
}

} // namespace

EncodingTransform EncodingTransform::identity(int dim) {
    return EncodingTransform{Vector::Zero(dim), Matrix::Identity(dim, dim), 0};
}

Matrix inv_sqrt_cov(const Matrix& cov) { return sym_root(cov, -1); }

Matrix sqrt_cov(const Matrix& cov) { return sym_root(cov, +1); }

Vector encode(const EncodingTransform& t, const Vector& x) {
    if (x.size() != t.mean.size())
        throw InvalidDimensionError("encode: dimension mismatch");
    return t.inv_sqrt * (x - t.mean);
}

Vector decode_with(const Matrix& sqrt_cov, const Vector& mean, const Vector& encoded) {
    return sqrt_cov * encoded + mean;
}

} // namespace cmasao
