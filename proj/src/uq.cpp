#include "upcl/uq.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "upcl/detail/polish.hpp"

namespace upcl {

namespace {

// Shared inflation core; s is already clamped to [0, sigma] upstream.
inline double upper_cl_from_mu_s(double mu, double s, double sigma, double factor) {
    if (s <= 0.0) return mu;
    return mu + s * std::sqrt(std::log(std::exp(1.0) * sigma / s)) * factor;
}

// Maximizes `score(x)` over the candidate rows, then (if a domain is given)
// polishes the `top` best candidates with coordinate descent: try +/- step
// per axis, keep improvements, halve all steps when a full pass stalls.
double maximize_over(const Eigen::MatrixXd& candidates,
                     const std::function<double(const Eigen::VectorXd&)>& score,
                     const Eigen::VectorXd& sweep_scores,
                     const Domain* domain, int top, int evals) {
    double best = sweep_scores.maxCoeff();
    if (domain == nullptr || top < 1 || evals < 1) return best;

    const int m = static_cast<int>(candidates.rows());
    top = std::min(top, m);
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + top, order.end(),
                      [&](int a, int b) { return sweep_scores[a] > sweep_scores[b]; });

    for (int r = 0; r < top; ++r) {
        int idx = order[static_cast<std::size_t>(r)];
        auto [x, fx] = detail::coordinate_polish(candidates.row(idx), sweep_scores[idx],
                                                 score, *domain, evals);
        best = std::max(best, fx);
    }
    return best;
}

} // namespace

double UqConstants::bound_factor() const {
    return c0 * std::sqrt(p * std::max(1.0, std::log(a0 * d_omega)));
}

double UqConstants::level() const { return 1.0 - std::exp(-t * t / 2.0); }

UqConstants UqConstants::from(const ProductKernel& kernel, const Domain& domain,
                              double t, double c0) {
    UqConstants c;
    c.c0 = c0;
    c.t = t;
    c.a0 = a0_moment(kernel);
    c.d_omega = domain.diameter();
    c.p = kernel.dim();
    c.sigma = kernel.sigma();
    return c;
}

double t_for_level(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("t_for_level: alpha must be in (0, 1)");
    return std::sqrt(-2.0 * std::log(alpha));
}

double upper_cl(const Eigen::VectorXd& x, const UqConstants& consts, const GpPosterior& post) {
    auto [mu, var] = post.mean_var(x);
    return upper_cl_from_mu_s(mu, std::sqrt(var), consts.sigma, consts.bound_factor() + consts.t);
}

Eigen::VectorXd upper_cl_many(const Eigen::MatrixXd& candidates, const UqConstants& consts,
                              const GpPosterior& post) {
    Eigen::VectorXd mu, var;
    post.mean_var_many(candidates, mu, var);
    const double factor = consts.bound_factor() + consts.t;
    Eigen::VectorXd out(mu.size());
    for (Eigen::Index i = 0; i < out.size(); ++i)
        out[i] = upper_cl_from_mu_s(mu[i], std::sqrt(var[i]), consts.sigma, factor);
    return out;
}

std::vector<bool> confidence_region(const Eigen::MatrixXd& candidates, const UqConstants& consts,
                                    const GpPosterior& post, double observed_max) {
    Eigen::VectorXd ucl = upper_cl_many(candidates, consts, post);
    std::vector<bool> mask(static_cast<std::size_t>(ucl.size()));
    for (Eigen::Index i = 0; i < ucl.size(); ++i)
        mask[static_cast<std::size_t>(i)] = ucl[i] >= observed_max;
    return mask;
}

Interval confidence_interval(const UqConstants& consts, const GpPosterior& post,
                             const Eigen::MatrixXd& candidates,
                             const Domain* domain, int polish_top, int polish_evals) {
    if (post.n() < 1) throw std::invalid_argument("confidence_interval: need n >= 1");
    Interval ci;
    ci.lo = post.best_observed();
    Eigen::VectorXd sweep = upper_cl_many(candidates, consts, post);
    double hi = maximize_over(
        candidates, [&](const Eigen::VectorXd& x) { return upper_cl(x, consts, post); },
        sweep, domain, polish_top, polish_evals);
    ci.hi = std::max(hi, ci.lo);
    return ci;
}

Interval naive_interval(const GpPosterior& post, const Eigen::MatrixXd& candidates,
                        const Domain* domain, int polish_top, int polish_evals) {
    if (post.n() < 1) throw std::invalid_argument("naive_interval: need n >= 1");
    auto score = [&](const Eigen::VectorXd& x) {
        auto [mu, var] = post.mean_var(x);
        return mu + kNaiveQuantile * std::sqrt(var);
    };
    Eigen::VectorXd mu, var;
    post.mean_var_many(candidates, mu, var);
    Eigen::VectorXd sweep(mu.size());
    for (Eigen::Index i = 0; i < sweep.size(); ++i)
        sweep[i] = mu[i] + kNaiveQuantile * std::sqrt(var[i]);
    Interval ci;
    ci.lo = post.best_observed();
    double hi = maximize_over(candidates, score, sweep, domain, polish_top, polish_evals);
    ci.hi = std::max(hi, ci.lo);
    return ci;
}

RegionKnnSummary::RegionKnnSummary(Eigen::MatrixXd candidates, std::vector<bool> mask, int k)
    : candidates_(std::move(candidates)), mask_(std::move(mask)), k_(k) {
    if (candidates_.rows() == 0) throw std::invalid_argument("knn summary: empty candidates");
    if (mask_.size() != static_cast<std::size_t>(candidates_.rows()))
        throw std::invalid_argument("knn summary: mask size mismatch");
    if (k_ < 1 || k_ > static_cast<int>(candidates_.rows()))
        throw std::invalid_argument("knn summary: k out of range");
}

bool RegionKnnSummary::predict(const Eigen::VectorXd& x) const {
    const int m = static_cast<int>(candidates_.rows());
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + k_, order.end(), [&](int a, int b) {
        double da = (candidates_.row(a).transpose() - x).squaredNorm();
        double db = (candidates_.row(b).transpose() - x).squaredNorm();
        if (da != db) return da < db;
        return a < b; // stable tie-break keeps predictions deterministic
    });
    int votes = 0;
    for (int i = 0; i < k_; ++i)
        votes += mask_[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] ? 1 : 0;
    return 2 * votes > k_;
}

} // namespace upcl
