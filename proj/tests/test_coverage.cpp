#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "upcl/coverage.hpp"
#include "upcl/csv.hpp"
#include "upcl/errors.hpp"

using namespace upcl;

namespace {

CoverageConfig small_config() {
    CoverageConfig cfg;
    cfg.family = Family::Matern;
    cfg.nu_list = {1.5};
    cfg.p = 2;
    cfg.a0_d_omega = 25.0;
    cfg.grid_per_dim = 15;
    cfg.n_initial = 4;
    cfg.checkpoints = {3, 6};
    cfg.n_repetitions = 4;
    cfg.alpha = 0.05;
    cfg.c0 = 1.0;
    cfg.seed = 99;
    return cfg;
}

} // namespace

TEST_CASE("coverage config validation") {
    CoverageConfig cfg = small_config();
    cfg.validate();

    CoverageConfig bad = cfg;
    bad.nu_list.clear();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.checkpoints = {5, 5};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.checkpoints = {10, 5};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.alpha = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.n_initial = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("run_repetition is deterministic and internally consistent") {
    CoverageConfig cfg = small_config();
    CoverageRunner runner(cfg, 1.5);

    CHECK(runner.mesh().rows() == 15 * 15);
    CHECK(runner.domain().dim() == 2);
    CHECK(runner.constants().p == 2);

    CoverageRepetition rep = runner.run_repetition(1234);
    CoverageRepetition again = runner.run_repetition(1234);
    CoverageRepetition other = runner.run_repetition(1235);

    REQUIRE(rep.checkpoints.size() == 2);
    CHECK(rep.truth_max == again.truth_max);
    CHECK(rep.truth_max != other.truth_max);
    for (size_t i = 0; i < rep.checkpoints.size(); ++i) {
        CHECK(rep.checkpoints[i].iteration == cfg.checkpoints[i]);
        CHECK(rep.checkpoints[i].ci_t.lo == again.checkpoints[i].ci_t.lo);
        CHECK(rep.checkpoints[i].ci_t.hi == again.checkpoints[i].ci_t.hi);
    }

    // The trace holds one initial batch plus one point per iteration, and the
    // observed responses match the truth at the sampled mesh nodes.
    CHECK(rep.info.initial_batches == 1);
    CHECK(rep.info.iterations == cfg.checkpoints.back());
    CHECK(rep.info.m_n() == cfg.n_initial + cfg.checkpoints.back());

    for (const CheckpointMeasurement& m : rep.checkpoints) {
        // The sequential interval always contains the best observation so
        // far; the lower ends of both intervals agree by construction.
        CHECK(m.ci_t.hi >= m.ci_t.lo);
        CHECK(m.ci_g.hi >= m.ci_g.lo);
        CHECK(m.ci_t.lo == doctest::Approx(m.ci_g.lo).epsilon(1e-12));
        // The uniform band dominates the pointwise one on the same sweep.
        CHECK(m.ci_t.hi >= m.ci_g.hi - 1e-12);
        // Coverage flags are consistent with the recorded interval.
        const bool in_t = rep.truth_max >= m.ci_t.lo - 1e-12 &&
                          rep.truth_max <= m.ci_t.hi + 1e-12;
        CHECK(m.cover_t == in_t);
    }
}

TEST_CASE("interval measurements can be replayed from the stored trace") {
    // Recomputing the checkpoint interval from the trace prefix must agree
    // with what the runner recorded (no hidden state drift).
    CoverageConfig cfg = small_config();
    CoverageRunner runner(cfg, 1.5);
    CoverageRepetition rep = runner.run_repetition(777);

    const CheckpointMeasurement& m = rep.checkpoints[0];
    const int keep = cfg.n_initial + m.iteration;

    Eigen::MatrixXd X = rep.info.flat_x();
    Eigen::VectorXd y = rep.info.flat_y();
    Dataset d;
    d.X = X.topRows(keep);
    d.y = y.head(keep);
    GpPosterior post = GpPosterior::fit(runner.kernel(), d);

    UqConstants consts = runner.constants();
    Interval ci = confidence_interval(consts, post, runner.mesh());
    CHECK(ci.lo == doctest::Approx(m.ci_t.lo).epsilon(1e-10));
    CHECK(ci.hi == doctest::Approx(m.ci_t.hi).epsilon(1e-10));

    Interval naive = naive_interval(post, runner.mesh());
    CHECK(naive.hi == doctest::Approx(m.ci_g.hi).epsilon(1e-10));
}

TEST_CASE("coverage_experiment aggregates per cell") {
    CoverageConfig cfg = small_config();
    CoverageResult result = coverage_experiment(cfg);

    CHECK(result.repetitions_requested == 4);
    CHECK(result.failures.empty());
    // nu x checkpoint x method cells, sorted.
    REQUIRE(result.cells.size() == 1 * 2 * 2);
    for (size_t i = 1; i < result.cells.size(); ++i) {
        const CoverageCell& a = result.cells[i - 1];
        const CoverageCell& b = result.cells[i];
        const bool sorted = a.nu < b.nu || (a.nu == b.nu && a.iterations < b.iterations) ||
                            (a.nu == b.nu && a.iterations == b.iterations &&
                             a.method < b.method);
        CHECK(sorted);
    }
    for (const CoverageCell& cell : result.cells) {
        CHECK(cell.coverage_rate >= 0.0);
        CHECK(cell.coverage_rate <= 1.0);
        CHECK(cell.mean_width >= 0.0);
        CHECK((cell.method == "ci_t_seq" || cell.method == "ci_g"));
    }
    // At matching (nu, iterations) the sequential interval is wider on
    // average than the naive one.
    for (size_t i = 0; i < result.cells.size(); i += 2) {
        const CoverageCell& g = result.cells[i];
        const CoverageCell& t = result.cells[i + 1];
        REQUIRE(g.method == "ci_g");
        REQUIRE(t.method == "ci_t_seq");
        CHECK(g.nu == t.nu);
        CHECK(g.iterations == t.iterations);
        CHECK(t.mean_width >= g.mean_width);
        CHECK(t.coverage_rate >= g.coverage_rate);
    }
}

TEST_CASE("coverage csv round trip") {
    CoverageConfig cfg = small_config();
    CoverageResult result = coverage_experiment(cfg);

    const std::string path = "coverage_test_out.csv";
    write_coverage_csv(result, cfg, path);
    csv::Table table = csv::read(path);
    REQUIRE(table.header.size() == 5);
    CHECK(table.header[0] == "nu");
    CHECK(table.header[2] == "method");
    REQUIRE(table.rows.size() == result.cells.size());
    for (size_t i = 0; i < table.rows.size(); ++i) {
        CHECK(csv::to_double(table.rows[i][0], path, table.row_lines[i]) ==
              doctest::Approx(result.cells[i].nu).epsilon(1e-12));
        CHECK(table.rows[i][2] == result.cells[i].method);
        CHECK(csv::to_double(table.rows[i][3], path, table.row_lines[i]) ==
              doctest::Approx(result.cells[i].coverage_rate).epsilon(1e-12));
    }

    // Byte-identical rerun.
    std::ifstream first(path);
    std::ostringstream text1;
    text1 << first.rdbuf();
    const std::string path2 = "coverage_test_out2.csv";
    write_coverage_csv(coverage_experiment(cfg), cfg, path2);
    std::ifstream second(path2);
    std::ostringstream text2;
    text2 << second.rdbuf();
    CHECK(text1.str() == text2.str());

    std::remove(path.c_str());
    std::remove(path2.c_str());
}
