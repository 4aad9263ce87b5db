#include "cmasao/functions.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>

#include "cmasao/errors.hpp"

namespace cmasao {

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;

double sphere_fn(const Vector& x) { return x.squaredNorm(); }

double ellipsoid_fn(const Vector& x, FunctionVariant v) {
    const Eigen::Index n = x.size();
    double acc = 0.0;
    if (v == FunctionVariant::as_printed) {
        for (Eigen::Index i = 0; i < n; ++i)
            acc += std::pow(10.0, 2.0 * static_cast<double>(i) + 1.0) * x(i) * x(i);
        return acc;
    }
    if (n == 1)
        return x(0) * x(0);
    for (Eigen::Index i = 0; i < n; ++i)
        acc += std::pow(10.0, 6.0 * static_cast<double>(i) /
                                  static_cast<double>(n - 1)) *
               x(i) * x(i);
    return acc;
}

double schwefel_fn(const Vector& x, FunctionVariant v) {
    if (v == FunctionVariant::as_printed)
        return static_cast<double>(x.size()) * x.squaredNorm();
    double acc = 0.0;
    double partial = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        partial += x(i);
        acc += partial * partial;
    }
    return acc;
}

double rosenbrock_fn(const Vector& x, FunctionVariant v) {
    const double shift = v == FunctionVariant::as_printed ? 1.0 : -1.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        const double a = x(i) * x(i) - x(i + 1);
        const double b = x(i) + shift;
        acc += 100.0 * a * a + b * b;
    }
    return acc;
}

double ackley_fn(const Vector& x, FunctionVariant v) {
    const double n = static_cast<double>(x.size());
    const double quad = -20.0 * std::exp(-0.2 * std::sqrt(x.squaredNorm() / n));
    double mean_cos = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        mean_cos += std::cos(2.0 * pi * x(i));
    mean_cos /= n;
    if (v == FunctionVariant::as_printed)
        return quad + std::exp(mean_cos);
    return quad - std::exp(mean_cos) + 20.0 + std::exp(1.0);
}

double rastrigin_fn(const Vector& x) {
    double acc = 10.0 * static_cast<double>(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        acc += x(i) * x(i) - 10.0 * std::cos(2.0 * pi * x(i));
    return acc;
}

double cigar_fn(const Vector& x) {
    return x(0) * x(0) + 1e6 * (x.squaredNorm() - x(0) * x(0));
}

double bohachevsky_fn(const Vector& x, FunctionVariant v) {
    const double c = v == FunctionVariant::as_printed ? 0.07 : 0.7;
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        acc += x(i) * x(i) + 2.0 * x(i + 1) * x(i + 1) -
               0.3 * std::cos(3.0 * pi * x(i)) - 0.4 * std::cos(4.0 * pi * x(i + 1)) +
               c;
    }
    return acc;
}

bool is_chained(const std::string& name) {
    return name == "rosenbrock" || name == "bohachevsky";
}

double formula(const std::string& name, const Vector& x, FunctionVariant v) {
    if (is_chained(name) && x.size() < 2)
        throw InvalidDimensionError(name + " requires dimension >= 2");
    if (name == "sphere" || name == "noisy_sphere")
        return sphere_fn(x);
    if (name == "ellipsoid")
        return ellipsoid_fn(x, v);
    if (name == "schwefel")
        return schwefel_fn(x, v);
    if (name == "schwefel14")
        return std::pow(schwefel_fn(x, v), 0.25);
    if (name == "rosenbrock")
        return rosenbrock_fn(x, v);
    if (name == "ackley")
        return ackley_fn(x, v);
    if (name == "rastrigin")
        return rastrigin_fn(x);
    if (name == "cigar")
        return cigar_fn(x);
    if (name == "bohachevsky")
        return bohachevsky_fn(x, v);
    throw DomainError("unknown function '" + name + "'");
}

Box uniform_box(int dim, double lo, double hi) {
    Box b;
    b.lower = Vector::Constant(dim, lo);
    b.upper = Vector::Constant(dim, hi);
    return b;
}

struct FunctionDefaults {
    double lo, hi, sigma0;
};

const std::map<std::string, FunctionDefaults>& defaults_table() {
    static const std::map<std::string, FunctionDefaults> table = {
        {"sphere", {-10.0, 10.0, 10.0}},
        {"noisy_sphere", {-3.0, 7.0, 5.0}},
        {"ellipsoid", {1.0, 5.0, 2.0}},
        {"schwefel", {-10.0, 10.0, 10.0}},
        {"schwefel14", {-10.0, 10.0, 10.0}},
        {"rosenbrock", {-5.0, 5.0, 0.5}},
        {"ackley", {1.0, 30.0, 14.5}},
        {"rastrigin", {1.0, 5.0, 2.0}},
        {"cigar", {-5.0, 5.0, 0.5}},
        {"bohachevsky", {1.0, 15.0, 7.0}},
    };
    return table;
}

} // namespace

double BenchmarkFunction::evaluate(const Vector& x, Rng* noise_stream) const {
    if (x.size() != dim)
        throw InvalidDimensionError("evaluate: point has wrong dimension");
    if (noise_eps.has_value() != (noise_stream != nullptr))
        throw DomainError("noise stream must be passed exactly when noise_eps is set");
    const Vector z = rotation ? Vector(*rotation * x) : x;
    double y = formula(name, z, variant);
    if (noise_eps)
        y *= std::exp(*noise_eps * noise_stream->normal());
    return y;
}

double BenchmarkFunction::true_value(const Vector& x) const {
    if (x.size() != dim)
        throw InvalidDimensionError("true_value: point has wrong dimension");
    const Vector z = rotation ? Vector(*rotation * x) : x;
    return formula(name, z, variant);
}

Vector BenchmarkFunction::documented_optimum() const {
    if (name == "rosenbrock")
        return Vector::Ones(dim);
    return Vector::Zero(dim);
}

BenchmarkFunction make_function(const std::string& name, int dim,
                                FunctionVariant variant) {
    if (dim < 1)
        throw InvalidDimensionError("dimension must be >= 1");
    const auto& table = defaults_table();
    auto it = table.find(name);
    if (it == table.end()) {
        std::string msg = "unknown function '" + name + "'; valid:";
        for (const auto& [k, v] : table)
            msg += " " + k;
        throw DomainError(msg);
    }
    BenchmarkFunction fn;
    fn.name = name;
    fn.dim = dim;
    fn.init_box = uniform_box(dim, it->second.lo, it->second.hi);
    fn.sigma0 = it->second.sigma0;
    fn.variant = variant;
    if (name == "noisy_sphere")
        fn.noise_eps = noisy_sphere_eps(dim);
    return fn;
}

const std::vector<std::string>& function_names() {
    static const std::vector<std::string> names = {
        "sphere",     "noisy_sphere", "ellipsoid", "schwefel",    "schwefel14",
        "rosenbrock", "ackley",       "rastrigin", "cigar",       "bohachevsky",
    };
    return names;
}

double noisy_sphere_eps(int dim) {
    static const std::map<int, double> eps = {
        {2, 0.35}, {4, 0.25}, {8, 0.18}, {16, 0.13},
        {20, 0.11}, {32, 0.09}, {40, 0.08},
    };
    auto it = eps.find(dim);
    if (it == eps.end())
        throw DomainError("no tabulated noise strength for dimension " +
                          std::to_string(dim));
    return it->second;
}

Matrix random_rotation(int dim, std::uint64_t seed) {
    if (dim < 1)
        throw InvalidDimensionError("dimension must be >= 1");
    Rng rng(seed);
    Matrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            g(i, j) = rng.normal();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j)
        if (r(j, j) < 0.0)
            q.col(j) = -q.col(j);
    return q;
}

} // namespace cmasao
