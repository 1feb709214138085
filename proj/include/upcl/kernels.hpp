#ifndef UPCL_KERNELS_HPP
#define UPCL_KERNELS_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace upcl {

enum class Family { Gaussian, Matern };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// One-dimensional stationary correlation.  Matern smoothness is restricted to
// the half-integers {0.5, 1.5, 2.5, 3.5}, which admit closed forms; nu is
// ignored for the Gaussian family.
struct Kernel1d {
    Family family = Family::Gaussian;
    double theta = 1.0;
    double nu = 1.5;

    void validate() const;
};

// Product correlation across dimensions with process variance sigma^2.
struct ProductKernel {
    std::vector<Kernel1d> components;
    double variance = 1.0;

    int dim() const { return static_cast<int>(components.size()); }
    double sigma() const;
    void validate() const;
};

// Axis-aligned box domain.
struct Domain {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    Domain() = default;
    Domain(Eigen::VectorXd lo, Eigen::VectorXd hi);
    static Domain unit_cube(int p);

    int dim() const { return static_cast<int>(lower.size()); }
    double diameter() const { return (upper - lower).norm(); }
    bool contains(const Eigen::VectorXd& x, double tol = 1e-12) const;
    Eigen::VectorXd clamp(Eigen::VectorXd x) const;
};

// Correlation value Psi(h) for a single component; Psi(0) = 1, symmetric in h.
double correlation_1d(const Kernel1d& k, double h);

// Product correlation at lag vector h (length must equal dim()).
double correlation(const ProductKernel& k, const Eigen::VectorXd& h);

// First absolute moment A0 of the spectral density.  Diverges for Matern
// nu <= 1/2, which is reported as an error.
double a0_moment_1d(const Kernel1d& k);

// A0 of a product kernel: the sum of the marginal moments.
double a0_moment(const ProductKernel& k);

// Inverts the closed form so configs can state A0 * D_Omega directly: returns
// the common length scale theta making a p-component isotropic product kernel
// satisfy a0_moment * domain.diameter() == target_a0_d.
double theta_for_target(Family family, double nu, double target_a0_d, const Domain& domain);

// Isotropic product kernel: p identical components.
ProductKernel iso_kernel(Family family, double nu, double theta, int p, double variance = 1.0);

} // namespace upcl

#endif
