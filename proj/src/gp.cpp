#include "upcl/gp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#ifdef UPCL_HAVE_LAPACKE
#include <lapacke.h>
#endif

#include "upcl/errors.hpp"
#include "upcl/rng.hpp"

namespace upcl {

namespace {

constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-6;
constexpr double kTwoPi = 6.2831853071795864769;

// Attempts LLT with the escalating jitter ladder; returns the factor and the
// jitter that succeeded, or throws NumericalError at the cap.
std::pair<Eigen::MatrixXd, double> cholesky_with_jitter(const Eigen::MatrixXd& K) {
    for (double jitter = kJitterStart; jitter <= kJitterMax * 1.0000001; jitter *= 10.0) {
        Eigen::MatrixXd J = K;
        J.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(J);
        if (llt.info() == Eigen::Success)
            return {Eigen::MatrixXd(llt.matrixL()), jitter};
    }
    throw NumericalError("correlation matrix numerically singular");
}

} // namespace

Eigen::MatrixXd correlation_matrix(const ProductKernel& kernel,
                                   const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const int p = kernel.dim();
    if (a.cols() != p || b.cols() != p)
        throw std::invalid_argument("correlation_matrix: dimension mismatch");
    Eigen::MatrixXd K(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j) {
            double prod = 1.0;
            for (int d = 0; d < p; ++d)
                prod *= correlation_1d(kernel.components[static_cast<std::size_t>(d)],
                                       a(i, d) - b(j, d));
            K(i, j) = prod;
        }
    return K;
}

GpPosterior GpPosterior::fit(const ProductKernel& kernel, Dataset data, double duplicate_tol) {
    kernel.validate();
    if (data.n() < 1) throw std::invalid_argument("fit: need n >= 1 (use prior() for n = 0)");
    if (data.p() != kernel.dim()) throw std::invalid_argument("fit: dimension mismatch");
    if (data.y.size() != data.n()) throw std::invalid_argument("fit: |Y| != n");
    for (int i = 0; i < data.n(); ++i)
        for (int j = i + 1; j < data.n(); ++j)
            if ((data.X.row(i) - data.X.row(j)).norm() <= duplicate_tol)
                throw std::invalid_argument("fit: duplicate design points");

    GpPosterior post;
    post.kernel_ = kernel;
    post.data_ = std::move(data);
    Eigen::MatrixXd K = correlation_matrix(kernel, post.data_.X, post.data_.X);
    auto [L, jitter] = cholesky_with_jitter(K);
    post.chol_ = std::move(L);
    post.jitter_ = jitter;
    post.kinv_y_ = post.chol_.transpose().triangularView<Eigen::Upper>().solve(
        post.chol_.triangularView<Eigen::Lower>().solve(post.data_.y));
    return post;
}

GpPosterior GpPosterior::prior(const ProductKernel& kernel) {
    kernel.validate();
    GpPosterior post;
    post.kernel_ = kernel;
    post.data_.X.resize(0, kernel.dim());
    post.data_.y.resize(0);
    return post;
}

double GpPosterior::best_observed() const {
    if (n() < 1) throw std::invalid_argument("best_observed: no data");
    return data_.y.maxCoeff();
}

Eigen::MatrixXd GpPosterior::cross_correlation(const Eigen::MatrixXd& query) const {
    return correlation_matrix(kernel_, data_.X, query);
}

Eigen::VectorXd GpPosterior::solve_correlation(Eigen::VectorXd rhs) const {
    if (n() == 0) return rhs;
    if (rhs.size() != n()) throw std::invalid_argument("solve_correlation: size mismatch");
    chol_.triangularView<Eigen::Lower>().solveInPlace(rhs);
    chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(rhs);
    return rhs;
}

std::pair<double, double> GpPosterior::mean_var(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd q(1, x.size());
    q.row(0) = x;
    Eigen::VectorXd mu, var;
    mean_var_many(q, mu, var);
    return {mu[0], var[0]};
}

void GpPosterior::mean_var_many(const Eigen::MatrixXd& query,
                                Eigen::VectorXd& mu, Eigen::VectorXd& var) const {
    if (query.cols() != kernel_.dim())
        throw std::invalid_argument("mean_var: dimension mismatch");
    const double s2 = kernel_.variance;
    if (n() == 0) {
        mu = Eigen::VectorXd::Zero(query.rows());
        var = Eigen::VectorXd::Constant(query.rows(), s2);
        return;
    }
    Eigen::MatrixXd R = cross_correlation(query);            // n x m
    mu = R.transpose() * kinv_y_;
    Eigen::MatrixXd W = chol_.triangularView<Eigen::Lower>().solve(R); // n x m
    Eigen::VectorXd reduction = W.cwiseProduct(W).colwise().sum().transpose();
    var.resize(query.rows());
    for (Eigen::Index i = 0; i < var.size(); ++i)
        var[i] = std::min(std::max(s2 * (1.0 - reduction[i]), 0.0), s2);
}

GridSimulator::GridSimulator(const ProductKernel& kernel, const Eigen::MatrixXd& grid,
                             SimMethod method) {
    kernel.validate();
    if (grid.rows() < 1) throw std::invalid_argument("GridSimulator: empty grid");
    Eigen::MatrixXd K = correlation_matrix(kernel, grid, grid);
    const double sigma = kernel.sigma();
    if (method == SimMethod::Cholesky) {
        auto [L, jitter] = cholesky_with_jitter(K);
        (void)jitter;
        factor_ = sigma * L;
        return;
    }
#ifdef UPCL_HAVE_LAPACKE
    if (method == SimMethod::PivotedPsd) {
        // P^T K P = L L^T with trailing (numerically negative-curvature)
        // pivots truncated, so K ~= (P L)(P L)^T: the same clip-to-PSD
        // semantics as the eigendecomposition at a fraction of the cost.
        const lapack_int n = static_cast<lapack_int>(K.rows());
        std::vector<lapack_int> piv(static_cast<std::size_t>(n));
        lapack_int rank = 0;
        lapack_int info = LAPACKE_dpstrf(LAPACK_COL_MAJOR, 'L', n, K.data(), n,
                                         piv.data(), &rank, -1.0);
        if (info < 0 || rank < 1)
            throw NumericalError("pivoted Cholesky failed on simulation grid");
        factor_.setZero(n, rank);
        for (lapack_int k = 0; k < n; ++k)
            for (lapack_int j = 0; j < std::min<lapack_int>(k + 1, rank); ++j)
                factor_(piv[static_cast<std::size_t>(k)] - 1, j) = sigma * K(k, j);
        return;
    }
#endif
    // Numerically singular correlation matrices have small negative
    // eigenvalues; clipping them reproduces the closest PSD matrix
    // without the noise floor a large jitter would inject.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigendecomposition failed on simulation grid");
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    factor_ = sigma * es.eigenvectors() * lam.asDiagonal();
}

Eigen::VectorXd GridSimulator::draw(std::uint64_t seed) const {
    auto rng = make_engine(seed);
    std::normal_distribution<double> norm(0.0, 1.0);
    Eigen::VectorXd xi(factor_.cols());
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = norm(rng);
    return factor_ * xi;
}

Eigen::VectorXd simulate_on_grid(const ProductKernel& kernel, const Eigen::MatrixXd& grid,
                                 std::uint64_t seed, SimMethod method) {
    return GridSimulator(kernel, grid, method).draw(seed);
}

SpectralSample::SpectralSample(const ProductKernel& kernel, int n_features, std::uint64_t seed) {
    kernel.validate();
    if (n_features < 1) throw std::invalid_argument("spectral_sample: n_features >= 1");
    const int p = kernel.dim();
    auto rng = make_engine(seed);
    std::normal_distribution<double> norm(0.0, 1.0);
    omega_.resize(n_features, p);
    phase_.resize(n_features);
    for (int j = 0; j < n_features; ++j) {
        for (int d = 0; d < p; ++d) {
            const Kernel1d& k = kernel.components[static_cast<std::size_t>(d)];
            if (k.family == Family::Gaussian) {
                // Spectral density is N(0, 2/theta^2).
                omega_(j, d) = norm(rng) * std::sqrt(2.0) / k.theta;
            } else {
                // Matern density is a scaled Student-t with 2*nu degrees of
                // freedom: omega = (sqrt(2)/theta) * N * sqrt(2 nu / chi2_{2nu}).
                std::gamma_distribution<double> chi2(k.nu, 2.0);
                double z = norm(rng);
                double c = chi2(rng);
                omega_(j, d) = (2.0 * std::sqrt(k.nu) / k.theta) * z / std::sqrt(c);
            }
        }
        std::uniform_real_distribution<double> unif(0.0, kTwoPi);
        phase_[j] = unif(rng);
    }
    amplitude_ = kernel.sigma() * std::sqrt(2.0 / n_features);
}

double SpectralSample::operator()(const Eigen::VectorXd& x) const {
    return amplitude_ * (omega_ * x + phase_).array().cos().sum();
}

Eigen::VectorXd SpectralSample::at(const Eigen::MatrixXd& query) const {
    Eigen::VectorXd out(query.rows());
    for (Eigen::Index i = 0; i < query.rows(); ++i) out[i] = (*this)(query.row(i));
    return out;
}

double sup_statistic_m(const GpPosterior& post, const Eigen::VectorXd& truth,
                       const Eigen::MatrixXd& grid) {
    if (truth.size() != grid.rows())
        throw std::invalid_argument("sup_statistic_m: |truth| != grid rows");
    Eigen::VectorXd mu, var;
    post.mean_var_many(grid, mu, var);
    const double sigma = post.kernel().sigma();
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < truth.size(); ++i) {
        double s = std::sqrt(var[i]);
        double term;
        if (s <= 0.0) {
            term = 0.0; // 0/0 convention at interpolated points
        } else {
            term = (truth[i] - mu[i]) / (s * std::sqrt(std::log(std::exp(1.0) * sigma / s)));
        }
        best = std::max(best, term);
    }
    return best;
}

} // namespace upcl
