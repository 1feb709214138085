#include "upcl/abo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>

#include "upcl/detail/polish.hpp"
#include "upcl/errors.hpp"
#include "upcl/rng.hpp"

namespace upcl {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double best_of(const std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>& batches,
               std::size_t count) {
    double best = kNan;
    for (std::size_t i = 0; i < count && i < batches.size(); ++i) {
        const Eigen::VectorXd& y = batches[i].second;
        if (y.size() == 0) continue;
        double m = y.maxCoeff();
        if (std::isnan(best) || m > best) best = m;
    }
    return best;
}

} // namespace

int Information::m_n() const {
    int total = 0;
    for (const auto& [x, y] : batches) total += static_cast<int>(x.rows());
    return total;
}

Eigen::MatrixXd Information::flat_x() const {
    int total = m_n();
    int p = batches.empty() ? 0 : static_cast<int>(batches.front().first.cols());
    Eigen::MatrixXd flat(total, p);
    int row = 0;
    for (const auto& [x, y] : batches) {
        flat.middleRows(row, x.rows()) = x;
        row += static_cast<int>(x.rows());
    }
    return flat;
}

Eigen::VectorXd Information::flat_y() const {
    Eigen::VectorXd flat(m_n());
    int row = 0;
    for (const auto& [x, y] : batches) {
        flat.segment(row, y.size()) = y;
        row += static_cast<int>(y.size());
    }
    return flat;
}

double Information::best() const {
    return best_of(batches, batches.size());
}

Dataset Information::dataset() const {
    return Dataset{flat_x(), flat_y()};
}

void Information::rebuild_history() {
    best_history.assign(static_cast<std::size_t>(iterations) + 1, kNan);
    best_history[0] = best_of(batches, static_cast<std::size_t>(initial_batches));
    for (int k = 1; k <= iterations; ++k)
        best_history[static_cast<std::size_t>(k)] =
            best_of(batches, static_cast<std::size_t>(initial_batches + k));
}

Information run_abo(const Policy& policy, const StoppingRule& stop,
                    const Objective& objective, const ProductKernel& kernel,
                    const Domain& domain, std::uint64_t seed, int hard_cap,
                    Information initial, const AboObserver& observer) {
    if (hard_cap < 1) throw std::invalid_argument("run_abo: hard_cap must be >= 1");
    kernel.validate();
    if (static_cast<int>(kernel.dim()) != domain.dim())
        throw std::invalid_argument("run_abo: kernel/domain dimension mismatch");

    Information info = std::move(initial);
    info.iterations = 0;
    info.initial_batches = static_cast<int>(info.batches.size());
    info.truncated = false;
    info.best_history.assign(1, info.best());

    for (;;) {
        if (info.iterations >= 1 && stop(info)) break;
        if (info.iterations >= hard_cap) {
            info.truncated = true;
            break;
        }
        std::uint64_t iter_seed = mix_seed(seed, static_cast<std::uint64_t>(info.iterations));
        Eigen::MatrixXd batch = policy(info, kernel, domain, iter_seed);
        if (batch.rows() < 1 || batch.cols() != domain.dim())
            throw std::invalid_argument("run_abo: policy returned an invalid batch shape");
        Eigen::VectorXd responses(batch.rows());
        for (Eigen::Index i = 0; i < batch.rows(); ++i) {
            Eigen::VectorXd x = batch.row(i);
            if (!domain.contains(x, 1e-9))
                throw std::invalid_argument("run_abo: policy returned a point outside the domain");
            double y = objective(x);
            if (!std::isfinite(y))
                throw NumericalError("run_abo: objective returned a non-finite value at iteration " +
                                     std::to_string(info.iterations + 1));
            responses[i] = y;
        }
        info.batches.emplace_back(std::move(batch), std::move(responses));
        info.iterations += 1;
        double prev = info.best_history.back();
        double batch_best = info.batches.back().second.maxCoeff();
        info.best_history.push_back(
            std::isnan(prev) || batch_best > prev ? batch_best : prev);
        if (observer) observer(info);
    }
    return info;
}

double norm_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

double norm_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double acq_ei(const Eigen::VectorXd& x, const GpPosterior& post) {
    double y_star = post.best_observed();
    auto [mu, var] = post.mean_var(x);
    double gap = mu - y_star;
    double s = std::sqrt(var);
    if (s <= 0.0) return std::max(gap, 0.0);
    double z = gap / s;
    return gap * norm_cdf(z) + s * norm_pdf(z);
}

double acq_ucb(const Eigen::VectorXd& x, const GpPosterior& post, double beta_n) {
    if (beta_n < 0.0) throw std::invalid_argument("acq_ucb: beta_n must be >= 0");
    auto [mu, var] = post.mean_var(x);
    return mu + beta_n * std::sqrt(var);
}

std::function<double(const Eigen::VectorXd&)> acq_pes_draw(
    const GpPosterior& post, int n_features, std::uint64_t seed) {
    auto prior_draw = std::make_shared<SpectralSample>(post.kernel(), n_features, seed);
    if (post.n() == 0)
        return [prior_draw](const Eigen::VectorXd& x) { return (*prior_draw)(x); };
    Eigen::VectorXd coef =
        post.solve_correlation(post.data().y - prior_draw->at(post.data().X));
    ProductKernel kernel = post.kernel();
    Eigen::MatrixXd design = post.data().X;
    return [prior_draw, coef = std::move(coef), kernel = std::move(kernel),
            design = std::move(design)](const Eigen::VectorXd& x) {
        Eigen::MatrixXd query(1, x.size());
        query.row(0) = x;
        Eigen::MatrixXd r = correlation_matrix(kernel, design, query);
        return (*prior_draw)(x) + r.col(0).dot(coef);
    };
}

Eigen::VectorXd maximize_acquisition(
    const std::function<double(const Eigen::VectorXd&)>& acq, const Domain& domain,
    const Eigen::MatrixXd& candidates, int polish_budget) {
    if (candidates.rows() < 1)
        throw std::invalid_argument("maximize_acquisition: empty candidate set");
    Eigen::VectorXd scores(candidates.rows());
    for (Eigen::Index i = 0; i < candidates.rows(); ++i)
        scores[i] = acq(candidates.row(i));

    int best_idx = 0;
    for (Eigen::Index i = 1; i < candidates.rows(); ++i)
        if (scores[i] > scores[best_idx]) best_idx = static_cast<int>(i);
    Eigen::VectorXd best_x = candidates.row(best_idx);
    double best_f = scores[best_idx];
    if (polish_budget < 1) return best_x;

    int top = std::min<int>(5, static_cast<int>(candidates.rows()));
    std::vector<int> order(static_cast<std::size_t>(candidates.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + top, order.end(),
                      [&](int a, int b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return a < b;
                      });
    for (int r = 0; r < top; ++r) {
        int idx = order[static_cast<std::size_t>(r)];
        auto [x, fx] = detail::coordinate_polish(candidates.row(idx), scores[idx],
                                                 acq, domain, polish_budget);
        if (fx > best_f) {
            best_f = fx;
            best_x = std::move(x);
        }
    }
    return best_x;
}

double ucb_beta(int iteration, int n_candidates, double delta) {
    if (iteration < 1 || n_candidates < 1)
        throw std::invalid_argument("ucb_beta: iteration and n_candidates must be >= 1");
    if (delta <= 0.0 || delta >= 1.0)
        throw std::invalid_argument("ucb_beta: delta must lie in (0, 1)");
    double t = static_cast<double>(iteration);
    double arg = n_candidates * t * t * M_PI * M_PI / (6.0 * delta);
    return std::sqrt(2.0 * std::log(arg));
}

namespace {

// Candidate rows not yet sampled (Chebyshev distance > tol from every design
// point); falls back to the full set when everything has been visited.
Eigen::MatrixXd unvisited_candidates(const Eigen::MatrixXd& candidates,
                                     const Eigen::MatrixXd& design, double tol) {
    if (design.rows() == 0) return candidates;
    std::vector<int> keep;
    keep.reserve(static_cast<std::size_t>(candidates.rows()));
    for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
        bool visited = false;
        for (Eigen::Index j = 0; j < design.rows() && !visited; ++j)
            visited = (candidates.row(i) - design.row(j)).cwiseAbs().maxCoeff() <= tol;
        if (!visited) keep.push_back(static_cast<int>(i));
    }
    if (keep.empty() || keep.size() == static_cast<std::size_t>(candidates.rows()))
        return candidates;
    Eigen::MatrixXd filtered(static_cast<Eigen::Index>(keep.size()), candidates.cols());
    for (std::size_t r = 0; r < keep.size(); ++r)
        filtered.row(static_cast<Eigen::Index>(r)) = candidates.row(keep[r]);
    return filtered;
}

void validate_policy_options(const PolicyOptions& opts) {
    if (opts.candidates.rows() < 1)
        throw std::invalid_argument("policy: candidate set must be non-empty");
    if (opts.visited_tol < 0.0)
        throw std::invalid_argument("policy: visited_tol must be >= 0");
}

Eigen::MatrixXd single_row(const Eigen::VectorXd& x) {
    Eigen::MatrixXd batch(1, x.size());
    batch.row(0) = x;
    return batch;
}

} // namespace

Policy policy_ei(PolicyOptions opts) {
    validate_policy_options(opts);
    return [opts = std::move(opts)](const Information& info, const ProductKernel& kernel,
                                    const Domain& domain, std::uint64_t) {
        if (info.m_n() == 0) return single_row(opts.candidates.row(0));
        Dataset data = info.dataset();
        Eigen::MatrixXd pool =
            opts.exclude_visited
                ? unvisited_candidates(opts.candidates, data.X, opts.visited_tol)
                : opts.candidates;
        GpPosterior post = GpPosterior::fit(kernel, std::move(data));
        auto acq = [&post](const Eigen::VectorXd& x) { return acq_ei(x, post); };
        return single_row(maximize_acquisition(acq, domain, pool, opts.polish_budget));
    };
}

Policy policy_ucb(PolicyOptions opts, UcbBeta beta) {
    validate_policy_options(opts);
    if (!beta) {
        double delta = opts.ucb_delta;
        beta = [delta](int iteration, int n_candidates) {
            return ucb_beta(iteration, n_candidates, delta);
        };
    }
    return [opts = std::move(opts), beta = std::move(beta)](
               const Information& info, const ProductKernel& kernel,
               const Domain& domain, std::uint64_t) {
        if (info.m_n() == 0) return single_row(opts.candidates.row(0));
        Dataset data = info.dataset();
        Eigen::MatrixXd pool =
            opts.exclude_visited
                ? unvisited_candidates(opts.candidates, data.X, opts.visited_tol)
                : opts.candidates;
        GpPosterior post = GpPosterior::fit(kernel, std::move(data));
        double beta_n =
            beta(info.iterations + 1, static_cast<int>(opts.candidates.rows()));
        auto acq = [&post, beta_n](const Eigen::VectorXd& x) {
            return acq_ucb(x, post, beta_n);
        };
        return single_row(maximize_acquisition(acq, domain, pool, opts.polish_budget));
    };
}

Policy policy_pes(PolicyOptions opts) {
    validate_policy_options(opts);
    if (opts.pes_features < 1)
        throw std::invalid_argument("policy_pes: pes_features must be >= 1");
    return [opts = std::move(opts)](const Information& info, const ProductKernel& kernel,
                                    const Domain& domain, std::uint64_t seed) {
        Dataset data = info.dataset();
        Eigen::MatrixXd pool =
            opts.exclude_visited
                ? unvisited_candidates(opts.candidates, data.X, opts.visited_tol)
                : opts.candidates;
        GpPosterior post = info.m_n() == 0 ? GpPosterior::prior(kernel)
                                           : GpPosterior::fit(kernel, std::move(data));
        auto draw = acq_pes_draw(post, opts.pes_features, seed);
        return single_row(maximize_acquisition(draw, domain, pool, opts.polish_budget));
    };
}

StoppingRule stop_fixed_budget(int n_iterations) {
    if (n_iterations < 1)
        throw std::invalid_argument("stop_fixed_budget: n_iterations must be >= 1");
    return [n_iterations](const Information& info) {
        return info.iterations >= n_iterations;
    };
}

StoppingRule stop_no_improvement(int window, double epsilon) {
    if (window < 1) throw std::invalid_argument("stop_no_improvement: window must be >= 1");
    if (epsilon < 0.0)
        throw std::invalid_argument("stop_no_improvement: epsilon must be >= 0");
    return [window, epsilon](const Information& info) {
        int t = info.iterations;
        if (t < 1 || t - window < 0) return false;
        if (info.best_history.size() <= static_cast<std::size_t>(t)) return false;
        double base = info.best_history[static_cast<std::size_t>(t - window)];
        double current = info.best_history[static_cast<std::size_t>(t)];
        if (std::isnan(base) || std::isnan(current)) return false;
        double improvement = current - base;
        return improvement < epsilon || improvement <= 0.0;
    };
}

} // namespace upcl
