#include "cmasao/cma.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "cmasao/archive.hpp"
#include "cmasao/errors.hpp"

namespace cmasao {

bool operator==(const CmaState& a, const CmaState& b) {
    return a.mean == b.mean && a.sigma == b.sigma && a.cov == b.cov &&
           a.p_sigma == b.p_sigma && a.p_c == b.p_c &&
           a.generation == b.generation && a.eval_count == b.eval_count &&
           a.rng == b.rng;
}

double eigen_floor(const Matrix& cov) {
    const double scale = cov.trace() / static_cast<double>(cov.rows());
    return std::max(1e-20 * scale, 1e-300);
}

void refresh_eigen(CmaState& state) {
    Matrix& c = state.cov;
    c = ((c + c.transpose()) * 0.5).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> solver(c);
    if (solver.info() != Eigen::Success)
        throw InvalidMatrixError("eigendecomposition of covariance failed");

    const double floor = eigen_floor(c);
    Vector vals = solver.eigenvalues();
    bool clamped = false;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals(i) < floor) {
            vals(i) = floor;
            clamped = true;
        }
    }
    const Matrix& basis = solver.eigenvectors();
    if (clamped) {
        c = basis * vals.asDiagonal() * basis.transpose();
        c = ((c + c.transpose()) * 0.5).eval();
    }

    state.eig.basis = basis;
    state.eig.scale = vals.cwiseSqrt();
    state.eig.inv_sqrt =
        basis * state.eig.scale.cwiseInverse().asDiagonal() * basis.transpose();
    state.eig.inv_sqrt = ((state.eig.inv_sqrt + state.eig.inv_sqrt.transpose()) * 0.5).eval();
    state.eig.fresh = true;
}

CmaParams default_params(int dim) {
    if (dim < 1)
        throw InvalidDimensionError("dimension must be >= 1");

    CmaParams p;
    p.dim = dim;
    const double n = static_cast<double>(dim);
    p.lambda = 4 + static_cast<int>(std::floor(3.0 * std::log(n)));
    p.mu = p.lambda / 2;

    p.weights.resize(p.mu);
    for (int i = 0; i < p.mu; ++i)
        p.weights(i) = std::log(p.mu + 0.5) - std::log(i + 1.0);
    p.weights /= p.weights.sum();

    p.mu_eff = 1.0 / p.weights.squaredNorm();

    p.c_sigma = (p.mu_eff + 2.0) / (n + p.mu_eff + 5.0);
    p.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((p.mu_eff - 1.0) / (n + 1.0)) - 1.0) +
                p.c_sigma;
    p.c_c = (4.0 + p.mu_eff / n) / (n + 4.0 + 2.0 * p.mu_eff / n);
    p.c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + p.mu_eff);
    p.c_mu = std::min(1.0 - p.c_1, 2.0 * (p.mu_eff - 2.0 + 1.0 / p.mu_eff) /
                                       ((n + 2.0) * (n + 2.0) + p.mu_eff));
    p.chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
    return p;
}

CmaState init_cma(const CmaParams& params, const Box& init_box, double sigma0,
                  std::uint64_t seed) {
    const int n = params.dim;
    if (init_box.lower.size() != n || init_box.upper.size() != n)
        throw InvalidBoxError("init box dimension mismatch");
    for (int i = 0; i < n; ++i)
        if (!(init_box.lower(i) < init_box.upper(i)))
            throw InvalidBoxError("init box degenerate on axis " + std::to_string(i));
    if (!(sigma0 > 0.0))
        throw DomainError("sigma0 must be positive");

    CmaState s;
    s.rng = Rng(seed);
    s.mean.resize(n);
    for (int i = 0; i < n; ++i)
        s.mean(i) = s.rng.uniform(init_box.lower(i), init_box.upper(i));
    s.sigma = sigma0;
    s.cov = Matrix::Identity(n, n);
    s.p_sigma = Vector::Zero(n);
    s.p_c = Vector::Zero(n);
    refresh_eigen(s);
    return s;
}

std::vector<Candidate> sample_population(CmaState& state, const CmaParams& params) {
    if (!state.eig.fresh)
        refresh_eigen(state);

    const int n = params.dim;
    std::vector<Candidate> pop(params.lambda);
    for (auto& cand : pop) {
        cand.z.resize(n);
        for (int i = 0; i < n; ++i)
            cand.z(i) = state.rng.normal();
        cand.x = state.mean +
                 state.sigma * (state.eig.basis * (state.eig.scale.asDiagonal() * cand.z));
    }
    return pop;
}

void update_state(CmaState& state, const CmaParams& params,
                  const std::vector<Candidate>& ranked) {
    const int evaluated = static_cast<int>(
        std::count_if(ranked.begin(), ranked.end(),
                      [](const Candidate& c) { return c.fitness.has_value(); }));
    if (evaluated < params.mu)
        throw IncompleteGenerationError("need at least mu evaluated candidates");

    const int n = params.dim;
    const Vector old_mean = state.mean;

    Vector new_mean = Vector::Zero(n);
    for (int i = 0; i < params.mu; ++i)
        new_mean += params.weights(i) * ranked[i].x;

    const Vector y_w = (new_mean - old_mean) / state.sigma;

    if (!state.eig.fresh)
        refresh_eigen(state);
    const Matrix& inv_sqrt = state.eig.inv_sqrt;

    state.p_sigma = (1.0 - params.c_sigma) * state.p_sigma +
                    std::sqrt(params.c_sigma * (2.0 - params.c_sigma) * params.mu_eff) *
                        (inv_sqrt * y_w);

    const double ps_norm = state.p_sigma.norm();
    const double decay = 1.0 - std::pow(1.0 - params.c_sigma,
                                        2.0 * static_cast<double>(state.generation + 1));
    const bool h_sig =
        ps_norm / std::sqrt(decay) < (1.4 + 2.0 / (n + 1.0)) * params.chi_n;

    state.p_c = (1.0 - params.c_c) * state.p_c;
    if (h_sig)
        state.p_c += std::sqrt(params.c_c * (2.0 - params.c_c) * params.mu_eff) * y_w;

    Matrix rank_mu = Matrix::Zero(n, n);
    for (int i = 0; i < params.mu; ++i) {
        const Vector y_i = (ranked[i].x - old_mean) / state.sigma;
        rank_mu.noalias() += params.weights(i) * (y_i * y_i.transpose());
    }

    const double delta_hsig = (h_sig ? 0.0 : 1.0) * params.c_c * (2.0 - params.c_c);
    state.cov = (1.0 - params.c_1 - params.c_mu) * state.cov +
                params.c_1 * (state.p_c * state.p_c.transpose() + delta_hsig * state.cov) +
                params.c_mu * rank_mu;

    state.sigma *= std::exp((params.c_sigma / params.d_sigma) *
                            (ps_norm / params.chi_n - 1.0));

    state.mean = new_mean;
    state.generation += 1;
    state.eig.fresh = false;
    refresh_eigen(state);
}

void gen_cma(CmaState& state, const CmaParams& params, const ObjectiveFn& objective,
             Archive* archive) {
    auto pop = sample_population(state, params);

    const long gen_stamp = state.generation;
    for (auto& cand : pop) {
        const double y = objective(cand.x);
        if (!std::isfinite(y))
            throw EvaluationError("objective returned non-finite value", cand.x);
        cand.fitness = y;
    }

    // Ascending minimization order; ties broken by candidate index.
    std::vector<int> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return *pop[a].fitness < *pop[b].fitness;
    });
    std::vector<Candidate> ranked;
    ranked.reserve(pop.size());
    for (int idx : order)
        ranked.push_back(pop[idx]);

    if (archive != nullptr) {
        for (const auto& cand : ranked)
            archive->add(cand.x, *cand.fitness, gen_stamp);
        state.eval_count += params.lambda;
    }

    update_state(state, params, ranked);
}

} // namespace cmasao
