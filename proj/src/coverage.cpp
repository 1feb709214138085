#include "upcl/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "upcl/csv.hpp"
#include "upcl/designs.hpp"
#include "upcl/errors.hpp"
#include "upcl/parallel.hpp"
#include "upcl/rng.hpp"

namespace upcl {

void CoverageConfig::validate() const {
    if (nu_list.empty()) throw ConfigError("coverage: nu_list must be non-empty");
    for (double nu : nu_list) {
        Kernel1d probe{family, 1.0, nu};
        probe.validate();
    }
    if (p < 1 || p > 25) throw ConfigError("coverage: p must lie in [1, 25]");
    if (!(a0_d_omega > 0.0)) throw ConfigError("coverage: a0_d_omega must be > 0");
    if (grid_per_dim < 2) throw ConfigError("coverage: grid_per_dim must be >= 2");
    if (random_mesh_size < 2) throw ConfigError("coverage: random_mesh_size must be >= 2");
    if (n_initial < 1) throw ConfigError("coverage: n_initial must be >= 1");
    if (checkpoints.empty()) throw ConfigError("coverage: checkpoints must be non-empty");
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 1)
            throw ConfigError("coverage: checkpoints must be >= 1");
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
            throw ConfigError("coverage: checkpoints must be strictly increasing");
    }
    if (n_repetitions < 1) throw ConfigError("coverage: n_repetitions must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("coverage: alpha must lie in (0, 1)");
    if (!(c0 > 0.0)) throw ConfigError("coverage: c0 must be > 0");
    if (!(ucb_delta > 0.0 && ucb_delta < 1.0))
        throw ConfigError("coverage: ucb_delta must lie in (0, 1)");
}

namespace {

Eigen::MatrixXd build_mesh(const CoverageConfig& cfg) {
    if (cfg.p <= 2) return grid_mesh(cfg.grid_per_dim, cfg.p);
    return uniform_random(cfg.random_mesh_size, cfg.p, mix_seed(cfg.seed, 0));
}

CoverageConfig validated(CoverageConfig cfg) {
    cfg.validate();
    return cfg;
}

} // namespace

CoverageRunner::CoverageRunner(const CoverageConfig& cfg, double nu)
    : cfg_(validated(cfg)), nu_(nu), domain_(Domain::unit_cube(cfg_.p)),
      kernel_(iso_kernel(cfg_.family, nu,
                         theta_for_target(cfg_.family, nu, cfg_.a0_d_omega, Domain::unit_cube(cfg_.p)),
                         cfg_.p, 1.0)),
      mesh_(build_mesh(cfg_)), truth_sim_(kernel_, mesh_, SimMethod::Cholesky) {}

UqConstants CoverageRunner::constants() const {
    return UqConstants::from(kernel_, domain_, t_for_level(cfg_.alpha), cfg_.c0);
}

int CoverageRunner::nearest_node(const Eigen::VectorXd& x) const {
    int best = 0;
    double best_d = (mesh_.row(0).transpose() - x).squaredNorm();
    for (Eigen::Index i = 1; i < mesh_.rows(); ++i) {
        double d = (mesh_.row(i).transpose() - x).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

CoverageRepetition CoverageRunner::run_repetition(std::uint64_t rep_seed) const {
    Eigen::VectorXd truth = truth_sim_.draw(mix_seed(rep_seed, 1));
    CoverageRepetition rep;
    rep.truth_max = truth.maxCoeff();

    // Initial design: optimal LHS snapped to distinct mesh nodes, topped up
    // from the lowest unused node index on collisions.
    Eigen::MatrixXd lhs = latin_hypercube(cfg_.n_initial, cfg_.p, mix_seed(rep_seed, 2));
    std::vector<int> nodes;
    nodes.reserve(static_cast<std::size_t>(cfg_.n_initial));
    for (Eigen::Index i = 0; i < lhs.rows(); ++i) {
        int k = nearest_node(lhs.row(i));
        if (std::find(nodes.begin(), nodes.end(), k) == nodes.end()) nodes.push_back(k);
    }
    for (int fill = 0; static_cast<int>(nodes.size()) < cfg_.n_initial; ++fill)
        if (std::find(nodes.begin(), nodes.end(), fill) == nodes.end())
            nodes.push_back(fill);

    Eigen::MatrixXd x0(cfg_.n_initial, cfg_.p);
    Eigen::VectorXd y0(cfg_.n_initial);
    for (int i = 0; i < cfg_.n_initial; ++i) {
        x0.row(i) = mesh_.row(nodes[static_cast<std::size_t>(i)]);
        y0[i] = truth[nodes[static_cast<std::size_t>(i)]];
    }
    Information initial;
    initial.batches.emplace_back(std::move(x0), std::move(y0));

    Objective objective = [&](const Eigen::VectorXd& x) {
        int k = nearest_node(x);
        if ((mesh_.row(k).transpose() - x).cwiseAbs().maxCoeff() > 1e-9)
            throw NumericalError("coverage objective queried off the mesh");
        return truth[k];
    };

    PolicyOptions opts;
    opts.candidates = mesh_;
    opts.exclude_visited = true;
    opts.ucb_delta = cfg_.ucb_delta;
    Policy policy = policy_ucb(std::move(opts));

    UqConstants consts = constants();
    AboObserver observer = [&](const Information& info) {
        if (!std::binary_search(cfg_.checkpoints.begin(), cfg_.checkpoints.end(),
                                info.iterations))
            return;
        GpPosterior post = GpPosterior::fit(kernel_, info.dataset());
        CheckpointMeasurement m;
        m.iteration = info.iterations;
        m.ci_t = confidence_interval(consts, post, mesh_);
        m.ci_g = naive_interval(post, mesh_);
        m.cover_t = m.ci_t.lo <= rep.truth_max && rep.truth_max <= m.ci_t.hi;
        m.cover_g = m.ci_g.lo <= rep.truth_max && rep.truth_max <= m.ci_g.hi;
        rep.checkpoints.push_back(m);
    };

    rep.info = run_abo(policy, stop_fixed_budget(cfg_.checkpoints.back()), objective,
                       kernel_, domain_, mix_seed(rep_seed, 3),
                       /*hard_cap=*/std::max(1000, cfg_.checkpoints.back()),
                       std::move(initial), observer);
    return rep;
}

CoverageResult coverage_experiment(const CoverageConfig& cfg, int threads) {
    cfg.validate();
    CoverageResult result;
    result.repetitions_requested = cfg.n_repetitions;
    const int reps = cfg.n_repetitions;

    for (std::size_t nu_idx = 0; nu_idx < cfg.nu_list.size(); ++nu_idx) {
        double nu = cfg.nu_list[nu_idx];
        CoverageRunner runner(cfg, nu);
        std::vector<CoverageRepetition> outcomes(static_cast<std::size_t>(reps));
        std::vector<std::string> errors(static_cast<std::size_t>(reps));
        parallel_for(reps, threads, [&](int r) {
            std::uint64_t rep_seed =
                mix_seed(cfg.seed, 1 + nu_idx * static_cast<std::uint64_t>(reps) +
                                       static_cast<std::uint64_t>(r));
            try {
                outcomes[static_cast<std::size_t>(r)] = runner.run_repetition(rep_seed);
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(r)] = e.what();
            }
        });

        for (int r = 0; r < reps; ++r)
            if (!errors[static_cast<std::size_t>(r)].empty()) {
                std::ostringstream msg;
                msg << "nu=" << csv::format_double(nu) << " repetition=" << r << ": "
                    << errors[static_cast<std::size_t>(r)];
                result.failures.push_back(msg.str());
            }

        for (std::size_t c = 0; c < cfg.checkpoints.size(); ++c) {
            int used = 0;
            double hits_t = 0.0, hits_g = 0.0, width_t = 0.0, width_g = 0.0;
            for (int r = 0; r < reps; ++r) {
                const auto idx = static_cast<std::size_t>(r);
                if (!errors[idx].empty()) continue;
                const CheckpointMeasurement& m = outcomes[idx].checkpoints.at(c);
                ++used;
                hits_t += m.cover_t ? 1.0 : 0.0;
                hits_g += m.cover_g ? 1.0 : 0.0;
                width_t += m.ci_t.width();
                width_g += m.ci_g.width();
            }
            double nan = std::numeric_limits<double>::quiet_NaN();
            CoverageCell cell_t{nu, cfg.checkpoints[c], "ci_t_seq",
                                used > 0 ? hits_t / used : nan,
                                used > 0 ? width_t / used : nan};
            CoverageCell cell_g{nu, cfg.checkpoints[c], "ci_g",
                                used > 0 ? hits_g / used : nan,
                                used > 0 ? width_g / used : nan};
            result.cells.push_back(std::move(cell_g));
            result.cells.push_back(std::move(cell_t));
        }
    }

    std::sort(result.cells.begin(), result.cells.end(),
              [](const CoverageCell& a, const CoverageCell& b) {
                  if (a.nu != b.nu) return a.nu < b.nu;
                  if (a.iterations != b.iterations) return a.iterations < b.iterations;
                  return a.method < b.method;
              });
    return result;
}

void write_coverage_csv(const CoverageResult& result, const CoverageConfig& cfg,
                        const std::string& out_path) {
    csv::Writer out(out_path);
    std::ostringstream nus;
    for (std::size_t i = 0; i < cfg.nu_list.size(); ++i) {
        if (i > 0) nus << ' ';
        nus << csv::format_double(cfg.nu_list[i]);
    }
    std::ostringstream cps;
    for (std::size_t i = 0; i < cfg.checkpoints.size(); ++i) {
        if (i > 0) cps << ' ';
        cps << cfg.checkpoints[i];
    }
    out.comment("family=" + family_name(cfg.family));
    out.comment("nu_list=" + nus.str());
    out.comment("p=" + std::to_string(cfg.p));
    out.comment("a0_d_omega=" + csv::format_double(cfg.a0_d_omega));
    out.comment(cfg.p <= 2 ? "mesh=tensor grid_per_dim=" + std::to_string(cfg.grid_per_dim)
                           : "mesh=random size=" + std::to_string(cfg.random_mesh_size));
    out.comment("n_initial=" + std::to_string(cfg.n_initial));
    out.comment("checkpoints=" + cps.str());
    out.comment("n_repetitions=" + std::to_string(cfg.n_repetitions));
    out.comment("alpha=" + csv::format_double(cfg.alpha));
    out.comment("c0=" + csv::format_double(cfg.c0));
    out.comment("ucb_delta=" + csv::format_double(cfg.ucb_delta));
    out.comment("seed=" + std::to_string(cfg.seed));
    out.comment("failed_repetitions=" + std::to_string(result.failures.size()));
    for (const std::string& failure : result.failures) out.comment("failure " + failure);
    out.header({"nu", "iterations", "method", "coverage_rate", "mean_width"});
    for (const CoverageCell& cell : result.cells)
        out.row({csv::format_double(cell.nu), std::to_string(cell.iterations), cell.method,
                 csv::format_double(cell.coverage_rate), csv::format_double(cell.mean_width)});
    out.close();
}

} // namespace upcl
