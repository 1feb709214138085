#include "upcl/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "upcl/csv.hpp"
#include "upcl/designs.hpp"
#include "upcl/errors.hpp"
#include "upcl/gp.hpp"
#include "upcl/parallel.hpp"
#include "upcl/rng.hpp"

namespace upcl {

std::string design_kind_name(DesignKind kind) {
    switch (kind) {
        case DesignKind::MaximinLHS: return "maximin_lhs";
        case DesignKind::UniformRandom: return "uniform_random";
    }
    throw std::invalid_argument("design_kind_name: unknown kind");
}

DesignKind design_kind_from_name(const std::string& name) {
    if (name == "maximin_lhs") return DesignKind::MaximinLHS;
    if (name == "uniform_random") return DesignKind::UniformRandom;
    throw ConfigError("unknown design kind '" + name +
                      "' (expected maximin_lhs or uniform_random)");
}

int CalibrationConfig::resolved_grid_size() const {
    if (grid_size > 0) return grid_size;
    if (p == 1) return 100;
    if (p == 2) return 1000;
    return 2000;
}

int CalibrationConfig::resolved_replications() const {
    if (n_replications > 0) return n_replications;
    return p == 1 ? 1000 : 100;
}

void CalibrationConfig::validate() const {
    if (p < 1 || p > 25) throw ConfigError("calibration: p must lie in [1, 25]");
    if (n_design < 2) throw ConfigError("calibration: n_design must be >= 2");
    if (!(a0_d_omega > 0.0)) throw ConfigError("calibration: a0_d_omega must be > 0");
    if (grid_size < 0) throw ConfigError("calibration: grid_size must be >= 0");
    if (n_replications < 0) throw ConfigError("calibration: n_replications must be >= 0");
    Kernel1d probe{family, 1.0, nu};
    probe.validate();
}

namespace {

Eigen::MatrixXd draw_design(const CalibrationConfig& cfg, std::uint64_t seed) {
    switch (cfg.design_kind) {
        case DesignKind::MaximinLHS:
            return latin_hypercube(cfg.n_design, cfg.p, seed);
        case DesignKind::UniformRandom:
            return uniform_random(cfg.n_design, cfg.p, seed);
    }
    throw std::invalid_argument("draw_design: unknown design kind");
}

} // namespace

CalibrationRecord estimate_h(const CalibrationConfig& cfg, int threads) {
    cfg.validate();
    const int n = cfg.n_design;
    const int reps = cfg.resolved_replications();
    const int grid_n = cfg.resolved_grid_size();

    Domain domain = Domain::unit_cube(cfg.p);
    double theta = theta_for_target(cfg.family, cfg.nu, cfg.a0_d_omega, domain);
    ProductKernel kernel = iso_kernel(cfg.family, cfg.nu, theta, cfg.p, 1.0);
    Eigen::MatrixXd grid = halton(grid_n, cfg.p);
    double denom = std::sqrt(cfg.p * std::max(1.0, std::log(cfg.a0_d_omega)));

    Eigen::MatrixXd fixed_design;
    if (!cfg.redraw_design) fixed_design = draw_design(cfg, mix_seed(cfg.seed, 0));

    std::vector<double> m1(static_cast<std::size_t>(reps));
    parallel_for(reps, threads, [&](int r) {
        try {
            std::uint64_t rep_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(r));
            Eigen::MatrixXd design = cfg.redraw_design
                                         ? draw_design(cfg, mix_seed(rep_seed, 1))
                                         : fixed_design;
            Eigen::MatrixXd joint(n + grid_n, cfg.p);
            joint.topRows(n) = design;
            joint.bottomRows(grid_n) = grid;
            GridSimulator sim(kernel, joint, SimMethod::PivotedPsd);
            Eigen::VectorXd z = sim.draw(mix_seed(rep_seed, 2));
            GpPosterior post = GpPosterior::fit(kernel, Dataset{std::move(design), z.head(n)});
            m1[static_cast<std::size_t>(r)] = sup_statistic_m(post, z.tail(grid_n), grid);
        } catch (const std::exception& e) {
            throw NumericalError("replication " + std::to_string(r) + ": " + e.what());
        }
    });

    double mean = 0.0;
    for (double v : m1) mean += v;
    mean /= reps;
    double ss = 0.0;
    for (double v : m1) ss += (v - mean) * (v - mean);
    double sd = reps > 1 ? std::sqrt(ss / (reps - 1)) : 0.0;

    CalibrationRecord record;
    record.config = cfg;
    record.h_estimate = mean / denom;
    record.mc_standard_error = sd / std::sqrt(static_cast<double>(reps)) / denom;
    record.m1_values = std::move(m1);
    return record;
}

std::vector<CalibrationRecord> calibration_suite(
    const std::vector<CalibrationConfig>& rows, const std::string& out_path,
    int threads, const std::vector<std::string>& extra_comments) {
    std::vector<CalibrationRecord> records;
    records.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        try {
            records.push_back(estimate_h(rows[i], threads));
        } catch (const std::exception& e) {
            CalibrationRecord failed;
            failed.config = rows[i];
            failed.h_estimate = std::numeric_limits<double>::quiet_NaN();
            failed.mc_standard_error = std::numeric_limits<double>::quiet_NaN();
            failed.error = e.what();
            records.push_back(std::move(failed));
        }
    }

    csv::Writer out(out_path);
    for (const std::string& comment : extra_comments) out.comment(comment);
    for (std::size_t i = 0; i < records.size(); ++i)
        if (!records[i].ok())
            out.comment("row " + std::to_string(i + 1) + " failed: " + records[i].error);
    out.header({"family", "nu", "p", "n_design", "a0_d_omega", "design_kind",
                "h_estimate", "mc_se", "n_reps", "seed"});
    for (const CalibrationRecord& rec : records) {
        const CalibrationConfig& c = rec.config;
        out.row({family_name(c.family), csv::format_double(c.nu), std::to_string(c.p),
                 std::to_string(c.n_design), csv::format_double(c.a0_d_omega),
                 design_kind_name(c.design_kind), csv::format_double(rec.h_estimate),
                 csv::format_double(rec.mc_standard_error),
                 std::to_string(c.resolved_replications()), std::to_string(c.seed)});
    }
    out.close();
    return records;
}

} // namespace upcl
