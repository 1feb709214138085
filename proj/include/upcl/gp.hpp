#ifndef UPCL_GP_HPP
#define UPCL_GP_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "upcl/kernels.hpp"

namespace upcl {

// Noiseless observations Y = f(X) at design points X (n x p).
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;

    int n() const { return static_cast<int>(X.rows()); }
    int p() const { return static_cast<int>(X.cols()); }
};

// Immutable kriging state: lower Cholesky factor of the jittered correlation
// matrix plus K^{-1}Y.  Supports the n = 0 prior (mean 0, variance sigma^2).
class GpPosterior {
public:
    // Interpolating fit; escalates jitter from 1e-10 by factors of 10 up to
    // 1e-6 on the unit-diagonal correlation matrix, then reports failure.
    static GpPosterior fit(const ProductKernel& kernel, Dataset data,
                           double duplicate_tol = 1e-12);

    static GpPosterior prior(const ProductKernel& kernel);

    int n() const { return data_.n(); }
    int p() const { return static_cast<int>(kernel_.dim()); }
    const ProductKernel& kernel() const { return kernel_; }
    const Dataset& data() const { return data_; }
    double jitter() const { return jitter_; }
    double best_observed() const;

    // Posterior mean and variance at one point; variance is clamped to
    // [0, sigma^2] so downstream sqrt/log stay well defined.
    std::pair<double, double> mean_var(const Eigen::VectorXd& x) const;

    // Vectorized form over query rows; used by grid sweeps.
    void mean_var_many(const Eigen::MatrixXd& query,
                       Eigen::VectorXd& mu, Eigen::VectorXd& var) const;

    // Solves (K + jitter I) c = rhs against the stored factorization.
    Eigen::VectorXd solve_correlation(Eigen::VectorXd rhs) const;

private:
    ProductKernel kernel_;
    Dataset data_;
    Eigen::MatrixXd chol_;   // lower triangular L with L L^T = K + jitter I
    Eigen::VectorXd kinv_y_;
    double jitter_ = 0.0;

    Eigen::MatrixXd cross_correlation(const Eigen::MatrixXd& query) const;
};

// Correlation matrix between row sets (unit diagonal when a == b).
Eigen::MatrixXd correlation_matrix(const ProductKernel& kernel,
                                   const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

enum class SimMethod {
    Cholesky,   // LLT of K + jitter I; fast, needs a well-conditioned K
    EigenClip,  // symmetric eigendecomposition with negative eigenvalues
                // clipped to zero; robust for numerically singular K
    PivotedPsd, // rank-revealing pivoted Cholesky (LAPACK dpstrf when built
                // with LAPACKE, otherwise same as EigenClip); equivalent
                // clip-to-PSD semantics at a fraction of the cost
};

// Exact multivariate-normal sampler on a fixed point set; the factorization
// is done once so many draws are cheap.
class GridSimulator {
public:
    GridSimulator(const ProductKernel& kernel, const Eigen::MatrixXd& grid,
                  SimMethod method = SimMethod::Cholesky);

    Eigen::VectorXd draw(std::uint64_t seed) const;
    int size() const { return static_cast<int>(factor_.rows()); }

private:
    Eigen::MatrixXd factor_; // A with A A^T = sigma^2 * K (up to jitter/clip)
};

// One realization of the process on the grid rows.
Eigen::VectorXd simulate_on_grid(const ProductKernel& kernel, const Eigen::MatrixXd& grid,
                                 std::uint64_t seed, SimMethod method = SimMethod::Cholesky);

// Random-feature draw h(x) = sigma*sqrt(2/n_features)*sum_j cos(w_j.x + b_j)
// with w_j sampled from the spectral density and b_j ~ Uniform[0, 2pi).
class SpectralSample {
public:
    SpectralSample(const ProductKernel& kernel, int n_features, std::uint64_t seed);

    double operator()(const Eigen::VectorXd& x) const;
    Eigen::VectorXd at(const Eigen::MatrixXd& query) const;

private:
    Eigen::MatrixXd omega_; // n_features x p
    Eigen::VectorXd phase_;
    double amplitude_;
};

// Grid maximum of (truth - mu) / (s * sqrt(log(e*sigma/s))) with 0/0 := 0
// where the posterior interpolates (s = 0).
double sup_statistic_m(const GpPosterior& post, const Eigen::VectorXd& truth,
                       const Eigen::MatrixXd& grid);

} // namespace upcl

#endif
