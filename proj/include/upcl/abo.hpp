#ifndef UPCL_ABO_HPP
#define UPCL_ABO_HPP

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "upcl/gp.hpp"
#include "upcl/kernels.hpp"

namespace upcl {

// Accumulated trace of an optimization run: the ordered batches, how many
// policy iterations produced them (pre-seeded batches are not iterations),
// and the best-so-far history used by stopping rules.
struct Information {
    std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>> batches;
    int iterations = 0;      // T once run_abo returns
    int initial_batches = 0; // batches present before the loop started
    bool truncated = false;  // hard cap fired before the stopping rule

    // best_history[k] is the best response after k iterations; entry 0 covers
    // the pre-seeded batches and is NaN when there are none.
    std::vector<double> best_history;

    int m_n() const;
    Eigen::MatrixXd flat_x() const;
    Eigen::VectorXd flat_y() const;
    double best() const; // NaN when empty
    Dataset dataset() const;

    // Recomputes best_history from batches, initial_batches and iterations
    // (run_abo maintains it incrementally; hand-built traces call this).
    void rebuild_history();
};

using Objective = std::function<double(const Eigen::VectorXd&)>;
using Policy = std::function<Eigen::MatrixXd(
    const Information&, const ProductKernel&, const Domain&, std::uint64_t)>;
using StoppingRule = std::function<bool(const Information&)>;
using AboObserver = std::function<void(const Information&)>;

// Sequential loop: check the stopping rule (never before the first
// iteration), ask the policy for a batch, evaluate the objective, merge.
// The policy receives mix_seed(seed, iteration) so traces are reproducible.
Information run_abo(const Policy& policy, const StoppingRule& stop,
                    const Objective& objective, const ProductKernel& kernel,
                    const Domain& domain, std::uint64_t seed, int hard_cap = 1000,
                    Information initial = {}, const AboObserver& observer = {});

double norm_pdf(double z);
double norm_cdf(double z);

// Expected improvement over the best observed value; the s = 0 limit is
// max(mu - y*, 0), which vanishes at design points.
double acq_ei(const Eigen::VectorXd& x, const GpPosterior& post);

// mu(x) + beta_n * sigma(x).
double acq_ucb(const Eigen::VectorXd& x, const GpPosterior& post, double beta_n);

// One posterior function draw: a spectral prior sample plus the kriging
// correction that makes it interpolate the data.  Maximizing the returned
// callable gives a Thompson-style acquisition.
std::function<double(const Eigen::VectorXd&)> acq_pes_draw(
    const GpPosterior& post, int n_features, std::uint64_t seed);

// Sweep the candidates (ties go to the lowest index), then coordinate-polish
// the few best ones when polish_budget > 0.  Returns the best point found.
Eigen::VectorXd maximize_acquisition(
    const std::function<double(const Eigen::VectorXd&)>& acq, const Domain& domain,
    const Eigen::MatrixXd& candidates, int polish_budget);

// Default UCB schedule: sqrt(2*log(n_candidates * t^2 * pi^2 / (6*delta))),
// a union-bound confidence width over a finite candidate set.
double ucb_beta(int iteration, int n_candidates, double delta = 0.1);

struct PolicyOptions {
    Eigen::MatrixXd candidates;  // rows must lie in the run's domain
    bool exclude_visited = false;
    double visited_tol = 1e-9;   // Chebyshev distance for "already sampled"
    int polish_budget = 0;       // 0 keeps the choice on the candidate set
    int pes_features = 512;
    double ucb_delta = 0.1;
};

// beta(iteration, n_candidates); defaults to ucb_beta with opts.ucb_delta.
using UcbBeta = std::function<double(int, int)>;

// The shipped policies return one point per iteration.  On an empty
// Information, EI and UCB fall back to the first candidate (there is
// nothing to fit); PES maximizes a prior draw.
Policy policy_ei(PolicyOptions opts);
Policy policy_ucb(PolicyOptions opts, UcbBeta beta = {});
Policy policy_pes(PolicyOptions opts);

StoppingRule stop_fixed_budget(int n_iterations);

// True once the best value failed to improve by at least epsilon over the
// last `window` iterations (a non-positive improvement never counts).
StoppingRule stop_no_improvement(int window, double epsilon);

} // namespace upcl

#endif
