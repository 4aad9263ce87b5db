#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cmasao/cma.hpp"

namespace cmasao {

enum class FunctionVariant {
    standard,   // corrected forms, zero at the documented optimum
    as_printed, // literal source-table forms, kept for auditability
};

/// One benchmark test function with its initialization box and step size.
struct BenchmarkFunction {
    std::string name;
    int dim = 0;
    Box init_box;
    double sigma0 = 0.0;
    std::optional<double> noise_eps;       // multiplicative noise strength
    std::optional<Matrix> rotation;        // x -> R x before the formula
    FunctionVariant variant = FunctionVariant::standard;

    /// Measured value; pass the noise stream iff noise_eps is set.
    double evaluate(const Vector& x, Rng* noise_stream = nullptr) const;

    /// Noiseless value of this function (termination metric).
    double true_value(const Vector& x) const;

    /// Point where the standard variant attains 0.
    Vector documented_optimum() const;
};

/// Registry lookup by CLI name ("sphere", "ackley", ...). Throws
/// DomainError for unknown names; message lists the valid ones.
BenchmarkFunction make_function(const std::string& name, int dim,
                                FunctionVariant variant = FunctionVariant::standard);

const std::vector<std::string>& function_names();

/// Noise strength for the noisy sphere by dimension (2..40 sweep values).
double noisy_sphere_eps(int dim);

/// Random orthogonal matrix (QR of a Gaussian draw), deterministic in seed.
Matrix random_rotation(int dim, std::uint64_t seed);

} // namespace cmasao
