#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cmasao/rng.hpp"

namespace cmasao {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Axis-aligned box, lower(i) < upper(i) per axis.
struct Box {
    Vector lower;
    Vector upper;
};

/// Objective callback: full search-space evaluator, minimization.
using ObjectiveFn = std::function<double(const Vector&)>;

/// Static strategy parameters of (mu/mu_w, lambda)-CMA-ES.
struct CmaParams {
    int dim = 0;
    int lambda = 0;
    int mu = 0;
    Vector weights;   // descending, sum 1
    double mu_eff = 0.0;
    double c_sigma = 0.0;
    double d_sigma = 0.0;
    double c_c = 0.0;
    double c_1 = 0.0;
    double c_mu = 0.0;
    double chi_n = 0.0; // E||N(0,I)||
};

/// Cached symmetric eigendecomposition of C: C = B * diag(D)^2 * B^T.
struct EigenCache {
    Matrix basis;     // B, orthonormal eigenvectors
    Vector scale;     // D, positive eigenvalue square roots
    Matrix inv_sqrt;  // B * diag(D)^-1 * B^T
    bool fresh = false;
};

/// Full CMA-ES strategy state.
struct CmaState {
    Vector mean;
    double sigma = 0.0;
    Matrix cov;
    Vector p_sigma;
    Vector p_c;
    EigenCache eig;
    long generation = 0;
    long eval_count = 0; // true objective evaluations only
    Rng rng;
};

bool operator==(const CmaState& a, const CmaState& b);

struct Candidate {
    Vector x;
    Vector z; // underlying standard-normal draw, x = m + sigma*B*D*z
    std::optional<double> fitness;
};

/// Eigenvalue clamp floor for C (relative to its mean diagonal scale).
double eigen_floor(const Matrix& cov);

/// Symmetrize C, recompute the eigendecomposition, clamp eigenvalues to
/// eigen_floor (rebuilding C when clamping fired) and mark the cache fresh.
void refresh_eigen(CmaState& state);

/// Standard default strategy parameters for dimension N.
CmaParams default_params(int dim);

/// Fresh state: mean uniform in init_box, sigma = sigma0, C = I, paths zero.
CmaState init_cma(const CmaParams& params, const Box& init_box, double sigma0,
                  std::uint64_t seed);

/// Draw lambda candidates x_k = m + sigma*B*D*z_k from the state's stream.
std::vector<Candidate> sample_population(CmaState& state, const CmaParams& params);

/// One strategy update from a generation ranked ascending by fitness.
void update_state(CmaState& state, const CmaParams& params,
                  const std::vector<Candidate>& ranked);

/// One full generation: sample, evaluate, rank, update. With an archive the
/// objective is the true function: all lambda pairs are appended and
/// eval_count grows by lambda. With archive == nullptr the objective is a
/// surrogate: no archive growth, eval_count unchanged.
class Archive;
void gen_cma(CmaState& state, const CmaParams& params, const ObjectiveFn& objective,
             Archive* archive);

} // namespace cmasao
