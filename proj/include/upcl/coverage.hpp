#ifndef UPCL_COVERAGE_HPP
#define UPCL_COVERAGE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "upcl/abo.hpp"
#include "upcl/gp.hpp"
#include "upcl/kernels.hpp"
#include "upcl/uq.hpp"

namespace upcl {

// The coverage study: simulate a process truth on a mesh, optimize it with
// UCB from a few initial points, and score the sequential interval against
// the plain quantile interval at several iteration checkpoints.
struct CoverageConfig {
    Family family = Family::Matern;
    std::vector<double> nu_list{1.5, 2.5, 3.5};
    int p = 2;
    double a0_d_omega = 25.0;
    int grid_per_dim = 51;    // tensor mesh for p <= 2
    int random_mesh_size = 4096; // mesh size for p >= 3
    int n_initial = 5;
    std::vector<int> checkpoints{5, 10, 15, 20, 25, 30};
    int n_repetitions = 100;
    double alpha = 0.05;
    double c0 = 1.0;
    double ucb_delta = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct CheckpointMeasurement {
    int iteration = 0;
    Interval ci_t; // sequential interval at level 1 - alpha
    Interval ci_g; // naive quantile interval
    bool cover_t = false;
    bool cover_g = false;
};

struct CoverageRepetition {
    double truth_max = 0.0;
    std::vector<CheckpointMeasurement> checkpoints;
    Information info; // final trace: one initial batch, then one point per iteration
};

// Per-smoothness driver; the truth covariance is factorized once so the
// repetitions only pay for draws and fits.  run_repetition is const and
// thread-safe.
class CoverageRunner {
public:
    CoverageRunner(const CoverageConfig& cfg, double nu);

    CoverageRepetition run_repetition(std::uint64_t rep_seed) const;

    const Eigen::MatrixXd& mesh() const { return mesh_; }
    const ProductKernel& kernel() const { return kernel_; }
    const Domain& domain() const { return domain_; }
    UqConstants constants() const;

private:
    CoverageConfig cfg_;
    double nu_;
    Domain domain_;
    ProductKernel kernel_;
    Eigen::MatrixXd mesh_;
    GridSimulator truth_sim_;

    int nearest_node(const Eigen::VectorXd& x) const;
};

struct CoverageCell {
    double nu = 0.0;
    int iterations = 0;
    std::string method; // "ci_t_seq" or "ci_g"
    double coverage_rate = 0.0;
    double mean_width = 0.0;
};

struct CoverageResult {
    std::vector<CoverageCell> cells; // sorted by (nu, iterations, method)
    std::vector<std::string> failures;
    int repetitions_requested = 0;
};

// Runs n_repetitions per smoothness with derived seeds; failed repetitions
// are recorded in `failures` and excluded from the aggregates.
CoverageResult coverage_experiment(const CoverageConfig& cfg, int threads = 1);

// CSV rows (nu, iterations, method, coverage_rate, mean_width) preceded by
// resolved-config and failure-count comments.
void write_coverage_csv(const CoverageResult& result, const CoverageConfig& cfg,
                        const std::string& out_path);

} // namespace upcl

#endif
