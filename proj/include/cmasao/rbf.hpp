#pragma once

#include <string>
#include <vector>

#include "cmasao/archive.hpp"
#include "cmasao/encoding.hpp"

namespace cmasao {

enum class RbfKernel { cubic, linear, thin_plate_spline };

/// phi(r); phi(0) = 0 for all three kernels.
double kernel_phi(RbfKernel k, double r);
/// phi'(r)/r, the radial factor of the gradient. Singular at r = 0 for the
/// linear kernel; callers drop the term there.
double kernel_dphi_over_r(RbfKernel k, double r);

std::string kernel_name(RbfKernel k);
RbfKernel kernel_from_name(const std::string& name);

/// RBF interpolant with a linear polynomial tail, fit on encoded points.
/// Prediction: sum_i w_i * phi(||x' - c_i||) + c0 + c^T x' with
/// x' = transform(x).
struct RbfModel {
    RbfKernel kernel = RbfKernel::cubic;
    Matrix centers;      // k x N, encoded space
    Vector rbf_weights;  // k
    Vector poly_coeffs;  // N+1: [c0, c]
    EncodingTransform transform;
    int train_size = 0;
    bool regularized = false;   // Tikhonov fallback fired
    bool tail_free = false;     // affinely degenerate geometry, no tail
};

/// Training-set size l for dimension N: floor(40 + 3*N^1.7).
long training_set_size(int dim);

/// The newest min(|archive|, l) entries, insertion order preserved, exact
/// duplicate x (1e-12 per coordinate) deduplicated keeping the newest.
std::vector<Archive::Entry> select_training_set(const Archive& archive, int dim);

/// Interpolation fit through the saddle system [Phi P; P^T 0]. Points are
/// already encoded; the returned model carries the identity transform.
RbfModel fit_rbf(const Matrix& points, const Vector& values, RbfKernel kernel);

/// Snapshot the encoding from the state, encode the selected training set,
/// fit, and attach the transform.
RbfModel build_surrogate(const Archive& archive, CmaState& state, RbfKernel kernel);

double predict(const RbfModel& model, const Vector& x);

/// Analytic gradient in raw coordinates (chain rule through the encoding).
/// For the linear kernel exactly at a center the non-differentiable term is
/// dropped and *at_kink set when provided.
Vector predict_gradient(const RbfModel& model, const Vector& x, bool* at_kink = nullptr);

} // namespace cmasao
