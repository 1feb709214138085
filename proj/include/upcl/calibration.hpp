#ifndef UPCL_CALIBRATION_HPP
#define UPCL_CALIBRATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "upcl/kernels.hpp"

namespace upcl {

enum class DesignKind {
    MaximinLHS,
    UniformRandom,
};

std::string design_kind_name(DesignKind kind);
DesignKind design_kind_from_name(const std::string& name);

// One Monte Carlo cell: kernel family/smoothness, dimension, moment target
// A0*D_Omega (theta is derived from it on [0,1]^p), design size/type, and
// the replication budget.
struct CalibrationConfig {
    Family family = Family::Matern;
    double nu = 1.5;
    int p = 1;
    int n_design = 20;
    double a0_d_omega = 1.0;
    DesignKind design_kind = DesignKind::MaximinLHS;
    int grid_size = 0;       // 0 = default for p: 100, 1000, 2000
    int n_replications = 0;  // 0 = default for p: 1000, 100, 100
    std::uint64_t seed = 0;
    bool redraw_design = true; // fresh design each replication

    int resolved_grid_size() const;
    int resolved_replications() const;
    void validate() const;
};

struct CalibrationRecord {
    CalibrationConfig config;
    double h_estimate = 0.0;
    double mc_standard_error = 0.0;
    std::vector<double> m1_values; // per-replication sup statistics
    std::string error;             // non-empty when the row failed

    bool ok() const { return error.empty(); }
};

// Monte Carlo estimate of H = E[M1] / sqrt(p * max(1, log(A0*D_Omega))).
// Each replication simulates one process realization jointly on the design
// and a Halton grid, fits on the design subset, and takes the grid supremum
// of the normalized prediction error.  Replications run concurrently;
// failures carry the replication index.
CalibrationRecord estimate_h(const CalibrationConfig& cfg, int threads = 1);

// Runs every row (continuing past failures), writes the CSV, and returns
// the records.  Failed rows keep NaN estimates and are echoed as comments;
// extra_comments are emitted first (callers record run metadata there).
std::vector<CalibrationRecord> calibration_suite(
    const std::vector<CalibrationConfig>& rows, const std::string& out_path,
    int threads = 1, const std::vector<std::string>& extra_comments = {});

} // namespace upcl

#endif
