#include "upcl/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "upcl/errors.hpp"

namespace upcl {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

bool is_supported_nu(double nu) {
    return nu == 0.5 || nu == 1.5 || nu == 2.5 || nu == 3.5;
}

// Gamma at half-integers and small integers via exact identities;
// a general Gamma routine is deliberately avoided.
double gamma_half_integer(double x) {
    if (x == 0.5) return kSqrtPi;
    if (x == 1.0) return 1.0;
    if (x > 1.0) return (x - 1.0) * gamma_half_integer(x - 1.0);
    throw std::invalid_argument("gamma_half_integer: unsupported argument");
}

} // namespace

std::string family_name(Family f) {
    return f == Family::Gaussian ? "gaussian" : "matern";
}

Family family_from_name(const std::string& name) {
    if (name == "gaussian") return Family::Gaussian;
    if (name == "matern") return Family::Matern;
    throw ConfigError("unknown kernel family '" + name + "' (expected gaussian|matern)");
}

void Kernel1d::validate() const {
    if (!(theta > 0.0)) throw std::invalid_argument("kernel theta must be > 0");
    if (family == Family::Matern && !is_supported_nu(nu))
        throw std::invalid_argument("Matern nu must be one of {0.5, 1.5, 2.5, 3.5}");
}

double ProductKernel::sigma() const { return std::sqrt(variance); }

void ProductKernel::validate() const {
    if (components.empty()) throw std::invalid_argument("product kernel needs >= 1 component");
    if (!(variance > 0.0)) throw std::invalid_argument("kernel variance must be > 0");
    for (const auto& c : components) c.validate();
}

Domain::Domain(Eigen::VectorXd lo, Eigen::VectorXd hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size() || lower.size() == 0)
        throw std::invalid_argument("domain bounds must be non-empty and of equal length");
    for (int i = 0; i < lower.size(); ++i)
        if (!(lower[i] < upper[i]))
            throw std::invalid_argument("domain requires lower[i] < upper[i]");
}

Domain Domain::unit_cube(int p) {
    return Domain(Eigen::VectorXd::Zero(p), Eigen::VectorXd::Ones(p));
}

bool Domain::contains(const Eigen::VectorXd& x, double tol) const {
    if (x.size() != lower.size()) return false;
    for (int i = 0; i < x.size(); ++i)
        if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
    return true;
}

Eigen::VectorXd Domain::clamp(Eigen::VectorXd x) const {
    for (int i = 0; i < x.size(); ++i)
        x[i] = std::min(std::max(x[i], lower[i]), upper[i]);
    return x;
}

double correlation_1d(const Kernel1d& k, double h) {
    double u = std::abs(h) / k.theta;
    if (k.family == Family::Gaussian) return std::exp(-u * u);
    // Half-integer Matern closed forms in a = 2*sqrt(nu)*|h|/theta.
    double a = 2.0 * std::sqrt(k.nu) * u;
    double e = std::exp(-a);
    if (k.nu == 0.5) return e;
    if (k.nu == 1.5) return (1.0 + a) * e;
    if (k.nu == 2.5) return (1.0 + a + a * a / 3.0) * e;
    if (k.nu == 3.5) return (1.0 + a + 2.0 * a * a / 5.0 + a * a * a / 15.0) * e;
    throw std::invalid_argument("Matern nu must be one of {0.5, 1.5, 2.5, 3.5}");
}

double correlation(const ProductKernel& k, const Eigen::VectorXd& h) {
    if (h.size() != k.dim())
        throw std::invalid_argument("correlation: lag dimension mismatch");
    double prod = 1.0;
    for (int i = 0; i < k.dim(); ++i) prod *= correlation_1d(k.components[i], h[i]);
    return prod;
}

double a0_moment_1d(const Kernel1d& k) {
    k.validate();
    if (k.family == Family::Gaussian) return 2.0 / (kSqrtPi * k.theta);
    if (k.nu <= 0.5)
        throw std::invalid_argument("A0 diverges for Matern nu <= 1/2");
    double g1 = gamma_half_integer(k.nu + 0.5);
    double g2 = gamma_half_integer(k.nu);
    return 4.0 * std::sqrt(k.nu) * g1 / (kSqrtPi * (2.0 * k.nu - 1.0) * k.theta * g2);
}

double a0_moment(const ProductKernel& k) {
    k.validate();
    double sum = 0.0;
    for (const auto& c : k.components) sum += a0_moment_1d(c);
    return sum;
}

double theta_for_target(Family family, double nu, double target_a0_d, const Domain& domain) {
    if (!(target_a0_d > 0.0)) throw std::invalid_argument("target A0*D must be > 0");
    Kernel1d unit{family, 1.0, nu};
    // A0 scales as 1/theta, and an isotropic product kernel multiplies the
    // marginal moment by p, so the inversion is exact.
    double c = a0_moment_1d(unit);
    return static_cast<double>(domain.dim()) * c * domain.diameter() / target_a0_d;
}

ProductKernel iso_kernel(Family family, double nu, double theta, int p, double variance) {
    ProductKernel k;
    k.components.assign(static_cast<std::size_t>(p), Kernel1d{family, theta, nu});
    k.variance = variance;
    k.validate();
    return k;
}

} // namespace upcl
