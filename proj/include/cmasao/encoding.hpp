#pragma once

#include "cmasao/cma.hpp"

namespace cmasao {

/// Affine coordinate transform x' = C^{-1/2} (x - m). Snapshotted from the
/// optimizer state at model-build time and frozen for the model's lifetime.
struct EncodingTransform {
    Vector mean;
    Matrix inv_sqrt;
    long generation_stamp = 0;

    static EncodingTransform identity(int dim);
};

/// B * diag(D)^-1 * B^T from the symmetric eigendecomposition of C,
/// eigenvalues clamped to eigen_floor first.
Matrix inv_sqrt_cov(const Matrix& cov);

/// B * diag(D) * B^T, the matching square root (decode direction).
Matrix sqrt_cov(const Matrix& cov);

Vector encode(const EncodingTransform& t, const Vector& x);

/// Inverse of encode for the C the transform was built from.
Vector decode_with(const Matrix& sqrt_cov, const Vector& mean, const Vector& encoded);

} // namespace cmasao
