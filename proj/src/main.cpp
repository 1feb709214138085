#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "upcl/abo.hpp"
#include "upcl/calibration.hpp"
#include "upcl/config.hpp"
#include "upcl/coverage.hpp"
#include "upcl/csv.hpp"
#include "upcl/designs.hpp"
#include "upcl/errors.hpp"
#include "upcl/gp.hpp"
#include "upcl/kernels.hpp"
#include "upcl/rng.hpp"
#include "upcl/uq.hpp"

namespace {

using namespace upcl;

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

int find_column(const csv::Table& table, const std::string& name, const std::string& path,
                bool required) {
    for (std::size_t i = 0; i < table.header.size(); ++i)
        if (table.header[i] == name) return static_cast<int>(i);
    if (required)
        throw ConfigError(path + ": missing required column '" + name + "'");
    return -1;
}

std::vector<CalibrationConfig> load_manifest(const std::string& path, std::uint64_t seed) {
    csv::Table table = csv::read(path);
    int col_family = find_column(table, "family", path, true);
    int col_nu = find_column(table, "nu", path, true);
    int col_p = find_column(table, "p", path, true);
    int col_n = find_column(table, "n_design", path, true);
    int col_moment = find_column(table, "a0_d_omega", path, true);
    int col_kind = find_column(table, "design_kind", path, false);
    int col_grid = find_column(table, "grid_size", path, false);
    int col_reps = find_column(table, "n_replications", path, false);

    std::vector<CalibrationConfig> rows;
    rows.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::vector<std::string>& fields = table.rows[r];
        int line = table.row_lines[r];
        CalibrationConfig cfg;
        cfg.family = family_from_name(fields[static_cast<std::size_t>(col_family)]);
        cfg.nu = csv::to_double(fields[static_cast<std::size_t>(col_nu)], path, line);
        cfg.p = static_cast<int>(csv::to_double(fields[static_cast<std::size_t>(col_p)], path, line));
        cfg.n_design =
            static_cast<int>(csv::to_double(fields[static_cast<std::size_t>(col_n)], path, line));
        cfg.a0_d_omega = csv::to_double(fields[static_cast<std::size_t>(col_moment)], path, line);
        if (col_kind >= 0)
            cfg.design_kind = design_kind_from_name(fields[static_cast<std::size_t>(col_kind)]);
        if (col_grid >= 0)
            cfg.grid_size = static_cast<int>(
                csv::to_double(fields[static_cast<std::size_t>(col_grid)], path, line));
        if (col_reps >= 0)
            cfg.n_replications = static_cast<int>(
                csv::to_double(fields[static_cast<std::size_t>(col_reps)], path, line));
        cfg.seed = mix_seed(seed, static_cast<std::uint64_t>(r));
        rows.push_back(cfg);
    }
    return rows;
}

int run_calibrate(const std::string& manifest, const std::string& out, std::uint64_t seed,
                  int threads) {
    std::vector<CalibrationConfig> rows = load_manifest(manifest, seed);
    std::vector<std::string> comments;
    comments.push_back("manifest=" + manifest);
    comments.push_back("seed=" + std::to_string(seed));
    std::vector<CalibrationRecord> records = calibration_suite(rows, out, threads, comments);
    int failed = 0;
    for (const CalibrationRecord& rec : records)
        if (!rec.ok()) ++failed;
    if (failed > 0) {
        std::cerr << "calibrate: " << failed << " of " << records.size()
                  << " rows failed (see comments in " << out << ")\n";
        return 3;
    }
    std::cout << "calibrate: wrote " << records.size() << " rows to " << out << "\n";
    return 0;
}

CoverageConfig load_coverage_config(const std::string& path, std::uint64_t seed,
                                    bool seed_given) {
    ConfigFile file = ConfigFile::parse_file(path);
    file.require_known_keys(
        "coverage", {"family", "nu_list", "p", "a0_d_omega", "grid_per_dim",
                     "random_mesh_size", "n_initial", "checkpoints", "n_repetitions",
                     "alpha", "c0", "ucb_delta", "seed"});
    CoverageConfig cfg;
    cfg.family = family_from_name(file.get_string("coverage", "family", "matern"));
    cfg.nu_list = file.get_double_list("coverage", "nu_list", cfg.nu_list);
    cfg.p = file.get_int("coverage", "p", cfg.p);
    cfg.a0_d_omega = file.get_double("coverage", "a0_d_omega", cfg.a0_d_omega);
    cfg.grid_per_dim = file.get_int("coverage", "grid_per_dim", cfg.grid_per_dim);
    cfg.random_mesh_size = file.get_int("coverage", "random_mesh_size", cfg.random_mesh_size);
    cfg.n_initial = file.get_int("coverage", "n_initial", cfg.n_initial);
    cfg.checkpoints = file.get_int_list("coverage", "checkpoints", cfg.checkpoints);
    cfg.n_repetitions = file.get_int("coverage", "n_repetitions", cfg.n_repetitions);
    cfg.alpha = file.get_double("coverage", "alpha", cfg.alpha);
    cfg.c0 = file.get_double("coverage", "c0", cfg.c0);
    cfg.ucb_delta = file.get_double("coverage", "ucb_delta", cfg.ucb_delta);
    cfg.seed = seed_given ? seed : file.get_u64("coverage", "seed", seed);
    cfg.validate();
    return cfg;
}

int run_coverage(const std::string& config_path, const std::string& out, std::uint64_t seed,
                 bool seed_given, int threads) {
    CoverageConfig cfg = load_coverage_config(config_path, seed, seed_given);
    CoverageResult result = coverage_experiment(cfg, threads);
    write_coverage_csv(result, cfg, out);
    if (!result.failures.empty()) {
        std::cerr << "coverage: " << result.failures.size()
                  << " repetitions failed (see comments in " << out << ")\n";
        return 3;
    }
    std::cout << "coverage: wrote " << result.cells.size() << " rows to " << out << "\n";
    return 0;
}

Eigen::MatrixXd read_points(const std::string& path, int p, bool with_response,
                            Eigen::VectorXd* responses) {
    csv::Table table = csv::read(path);
    int expected = p + (with_response ? 1 : 0);
    if (static_cast<int>(table.header.size()) != expected)
        throw ConfigError(path + ": expected " + std::to_string(expected) +
                          " columns, got " + std::to_string(table.header.size()));
    Eigen::MatrixXd points(static_cast<Eigen::Index>(table.rows.size()), p);
    if (with_response) responses->resize(static_cast<Eigen::Index>(table.rows.size()));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        int line = table.row_lines[r];
        for (int c = 0; c < p; ++c)
            points(static_cast<Eigen::Index>(r), c) =
                csv::to_double(table.rows[r][static_cast<std::size_t>(c)], path, line);
        if (with_response)
            (*responses)[static_cast<Eigen::Index>(r)] =
                csv::to_double(table.rows[r][static_cast<std::size_t>(p)], path, line);
    }
    return points;
}

void comment_kernel(csv::Writer& out, const ProductKernel& kernel, const Domain& domain) {
    std::string thetas, nus;
    for (std::size_t i = 0; i < kernel.components.size(); ++i) {
        if (i > 0) {
            thetas += ' ';
            nus += ' ';
        }
        thetas += csv::format_double(kernel.components[i].theta);
        nus += csv::format_double(kernel.components[i].nu);
    }
    out.comment("family=" + family_name(kernel.components.front().family));
    out.comment("nu=" + nus);
    out.comment("theta=" + thetas);
    out.comment("variance=" + csv::format_double(kernel.variance));
    out.comment("a0=" + csv::format_double(a0_moment(kernel)));
    out.comment("d_omega=" + csv::format_double(domain.diameter()));
}

int run_upper_cl(const std::string& config_path, const std::string& data_path,
                 const std::string& query_path, const std::string& out_path) {
    ConfigFile file = ConfigFile::parse_file(config_path);
    file.require_known_keys("uq", {"alpha", "c0"});
    Domain domain = load_domain(file);
    ProductKernel kernel = load_kernel(file, domain);
    double alpha = file.get_double("uq", "alpha", 0.05);
    double c0 = file.get_double("uq", "c0", 1.0);
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError(config_path + ": [uq] alpha must lie in (0, 1)");
    if (!(c0 > 0.0)) throw ConfigError(config_path + ": [uq] c0 must be > 0");

    int p = domain.dim();
    Eigen::VectorXd y;
    Eigen::MatrixXd x = read_points(data_path, p, true, &y);
    if (x.rows() < 1) throw ConfigError(data_path + ": need at least one data row");
    Eigen::MatrixXd query = read_points(query_path, p, false, nullptr);

    GpPosterior post = GpPosterior::fit(kernel, Dataset{x, y});
    UqConstants consts = UqConstants::from(kernel, domain, t_for_level(alpha), c0);

    csv::Writer out(out_path);
    comment_kernel(out, kernel, domain);
    out.comment("alpha=" + csv::format_double(alpha));
    out.comment("t=" + csv::format_double(consts.t));
    out.comment("c0=" + csv::format_double(c0));
    out.comment("n_data=" + std::to_string(x.rows()));
    std::vector<std::string> header;
    for (int c = 0; c < p; ++c) header.push_back("x" + std::to_string(c + 1));
    header.insert(header.end(), {"mu", "s", "upper_cl"});
    out.header(header);
    for (Eigen::Index i = 0; i < query.rows(); ++i) {
        Eigen::VectorXd point = query.row(i);
        auto [mu, var] = post.mean_var(point);
        double s = std::sqrt(var);
        double ucl = upper_cl(point, consts, post);
        std::vector<std::string> fields;
        for (int c = 0; c < p; ++c) fields.push_back(csv::format_double(point[c]));
        fields.push_back(csv::format_double(mu));
        fields.push_back(csv::format_double(s));
        fields.push_back(csv::format_double(ucl));
        out.row(fields);
    }
    out.close();
    std::cout << "upper-cl: wrote " << query.rows() << " rows to " << out_path << "\n";
    return 0;
}

Objective make_objective(const std::string& name, const ProductKernel& kernel,
                         std::uint64_t seed) {
    if (name == "gp-sample") {
        auto draw = std::make_shared<SpectralSample>(kernel, 2048, mix_seed(seed, 101));
        return [draw](const Eigen::VectorXd& x) { return (*draw)(x); };
    }
    if (name == "branin") {
        return [](const Eigen::VectorXd& x) {
            if (x.size() != 2)
                throw NumericalError("branin objective needs a 2-d domain");
            double x1 = x[0], x2 = x[1];
            double a = 1.0, b = 5.1 / (4.0 * M_PI * M_PI), c = 5.0 / M_PI;
            double r = 6.0, s = 10.0, t = 1.0 / (8.0 * M_PI);
            double value = a * std::pow(x2 - b * x1 * x1 + c * x1 - r, 2) +
                           s * (1.0 - t) * std::cos(x1) + s;
            return -value;
        };
    }
    if (name == "sphere")
        return [](const Eigen::VectorXd& x) { return -x.squaredNorm(); };
    throw ConfigError("unknown objective '" + name +
                      "' (available: gp-sample, branin, sphere)");
}

Eigen::MatrixXd optimize_mesh(const ConfigFile& file, const Domain& domain,
                              std::uint64_t seed) {
    int p = domain.dim();
    if (p <= 2) {
        int per_dim = file.get_int("optimize", "mesh_per_dim", 51);
        if (per_dim < 2) throw ConfigError("optimize: mesh_per_dim must be >= 2");
        return map_to_domain(grid_mesh(per_dim, p), domain);
    }
    int size = file.get_int("optimize", "mesh_size", 4096);
    if (size < 2) throw ConfigError("optimize: mesh_size must be >= 2");
    return map_to_domain(uniform_random(size, p, mix_seed(seed, 0)), domain);
}

int run_optimize(const std::string& config_path, const std::string& objective_name,
                 const std::string& out_prefix, std::uint64_t seed, bool seed_given) {
    ConfigFile file = ConfigFile::parse_file(config_path);
    file.require_known_keys(
        "optimize", {"policy", "n_initial", "mesh_per_dim", "mesh_size", "polish_budget",
                     "pes_features", "ucb_delta", "alpha", "c0", "stop", "budget",
                     "window", "epsilon", "hard_cap", "knn_k", "seed"});
    Domain domain = load_domain(file);
    ProductKernel kernel = load_kernel(file, domain);
    std::uint64_t run_seed = seed_given ? seed : file.get_u64("optimize", "seed", seed);

    std::string policy_name = file.get_string("optimize", "policy", "ei");
    int n_initial = file.get_int("optimize", "n_initial", 5);
    if (n_initial < 1) throw ConfigError("optimize: n_initial must be >= 1");
    double alpha = file.get_double("optimize", "alpha", 0.05);
    double c0 = file.get_double("optimize", "c0", 1.0);
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError(config_path + ": [optimize] alpha must lie in (0, 1)");
    if (!(c0 > 0.0)) throw ConfigError(config_path + ": [optimize] c0 must be > 0");
    int hard_cap = file.get_int("optimize", "hard_cap", 1000);

    PolicyOptions opts;
    opts.candidates = optimize_mesh(file, domain, run_seed);
    opts.exclude_visited = true;
    opts.polish_budget = file.get_int("optimize", "polish_budget", 100);
    opts.pes_features = file.get_int("optimize", "pes_features", 512);
    opts.ucb_delta = file.get_double("optimize", "ucb_delta", 0.1);
    Eigen::MatrixXd mesh = opts.candidates;

    Policy policy;
    if (policy_name == "ei") policy = policy_ei(opts);
    else if (policy_name == "ucb") policy = policy_ucb(opts);
    else if (policy_name == "pes") policy = policy_pes(opts);
    else throw ConfigError("unknown policy '" + policy_name + "' (available: ei, ucb, pes)");

    std::string stop_name = file.get_string("optimize", "stop", "fixed_budget");
    StoppingRule stop;
    if (stop_name == "fixed_budget") {
        stop = stop_fixed_budget(file.get_int("optimize", "budget", 20));
    } else if (stop_name == "no_improvement") {
        stop = stop_no_improvement(file.get_int("optimize", "window", 3),
                                   file.get_double("optimize", "epsilon", 1e-4));
    } else {
        throw ConfigError("unknown stop rule '" + stop_name +
                          "' (available: fixed_budget, no_improvement)");
    }

    Objective objective = make_objective(objective_name, kernel, run_seed);

    Information initial;
    Eigen::MatrixXd x0 =
        map_to_domain(latin_hypercube(n_initial, domain.dim(), mix_seed(run_seed, 1)), domain);
    Eigen::VectorXd y0(n_initial);
    for (int i = 0; i < n_initial; ++i) {
        double v = objective(x0.row(i));
        if (!std::isfinite(v))
            throw NumericalError("objective returned a non-finite value on the initial design");
        y0[i] = v;
    }
    initial.batches.emplace_back(std::move(x0), std::move(y0));

    Information info = run_abo(policy, stop, objective, kernel, domain,
                               mix_seed(run_seed, 2), hard_cap, std::move(initial));

    int p = domain.dim();
    std::string trace_path = out_prefix + "_trace.csv";
    csv::Writer trace(trace_path);
    comment_kernel(trace, kernel, domain);
    trace.comment("objective=" + objective_name);
    trace.comment("policy=" + policy_name);
    trace.comment("stop=" + stop_name);
    trace.comment("seed=" + std::to_string(run_seed));
    trace.comment("iterations=" + std::to_string(info.iterations));
    trace.comment(std::string("truncated=") + (info.truncated ? "true" : "false"));
    std::vector<std::string> header{"iteration"};
    for (int c = 0; c < p; ++c) header.push_back("x" + std::to_string(c + 1));
    header.insert(header.end(), {"response", "best_so_far", "policy_name"});
    trace.header(header);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < info.batches.size(); ++b) {
        int iteration = b < static_cast<std::size_t>(info.initial_batches)
                            ? 0
                            : static_cast<int>(b) - info.initial_batches + 1;
        const auto& [bx, by] = info.batches[b];
        for (Eigen::Index i = 0; i < bx.rows(); ++i) {
            best = std::max(best, by[i]);
            std::vector<std::string> fields{std::to_string(iteration)};
            for (int c = 0; c < p; ++c) fields.push_back(csv::format_double(bx(i, c)));
            fields.push_back(csv::format_double(by[i]));
            fields.push_back(csv::format_double(best));
            fields.push_back(iteration == 0 ? "initial" : policy_name);
            trace.row(fields);
        }
    }
    trace.close();

    GpPosterior post = GpPosterior::fit(kernel, info.dataset());
    UqConstants consts = UqConstants::from(kernel, domain, t_for_level(alpha), c0);
    double observed_max = post.best_observed();
    std::vector<bool> mask = confidence_region(mesh, consts, post, observed_max);
    Interval ci = confidence_interval(consts, post, mesh, &domain);
    Interval naive = naive_interval(post, mesh, &domain);

    std::string region_path = out_prefix + "_region.csv";
    csv::Writer region(region_path);
    comment_kernel(region, kernel, domain);
    region.comment("alpha=" + csv::format_double(alpha));
    region.comment("t=" + csv::format_double(consts.t));
    region.comment("c0=" + csv::format_double(c0));
    region.comment("observed_max=" + csv::format_double(observed_max));
    region.comment("ci_lo=" + csv::format_double(ci.lo));
    region.comment("ci_hi=" + csv::format_double(ci.hi));
    region.comment("naive_lo=" + csv::format_double(naive.lo));
    region.comment("naive_hi=" + csv::format_double(naive.hi));
    std::vector<std::string> region_header;
    for (int c = 0; c < p; ++c) region_header.push_back("x" + std::to_string(c + 1));
    region_header.push_back("in_region");
    region.header(region_header);
    for (Eigen::Index i = 0; i < mesh.rows(); ++i) {
        std::vector<std::string> fields;
        for (int c = 0; c < p; ++c) fields.push_back(csv::format_double(mesh(i, c)));
        fields.push_back(mask[static_cast<std::size_t>(i)] ? "1" : "0");
        region.row(fields);
    }
    region.close();

    std::cout << "optimize: T=" << info.iterations << " best=" << csv::format_double(best)
              << " ci=[" << csv::format_double(ci.lo) << ", " << csv::format_double(ci.hi)
              << "] -> " << trace_path << ", " << region_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian-process uncertainty quantification for Bayesian optimization"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    int threads = 0;
    CLI::Option* seed_opt = app.add_option("--seed", seed, "Base random seed (default 0)");
    app.add_option("--threads", threads, "Worker threads (default: all cores)");

    std::string manifest, config_path, data_path, query_path, out_path, out_prefix;
    std::string objective_name;

    CLI::App* calibrate = app.add_subcommand("calibrate", "Run a calibration manifest");
    calibrate->add_option("--manifest", manifest, "Manifest CSV")->required();
    calibrate->add_option("--out", out_path, "Output CSV")->required();
    calibrate->fallthrough();

    CLI::App* coverage = app.add_subcommand("coverage", "Run the coverage experiment");
    coverage->add_option("--config", config_path, "Config file")->required();
    coverage->add_option("--out", out_path, "Output CSV")->required();
    coverage->fallthrough();

    CLI::App* upper = app.add_subcommand("upper-cl", "Evaluate the confidence upper limit");
    upper->add_option("--config", config_path, "Config file")->required();
    upper->add_option("--data", data_path, "Design CSV (x columns then y)")->required();
    upper->add_option("--query", query_path, "Query points CSV")->required();
    upper->add_option("--out", out_path, "Output CSV")->required();
    upper->fallthrough();

    CLI::App* optimize = app.add_subcommand("optimize", "Optimize a built-in objective");
    optimize->add_option("--config", config_path, "Config file")->required();
    optimize->add_option("--objective", objective_name, "Objective name")->required();
    optimize->add_option("--out-prefix", out_prefix, "Output path prefix")->required();
    optimize->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    bool seed_given = seed_opt->count() > 0;
    int n_threads = resolve_threads(threads);

    try {
        if (calibrate->parsed()) return run_calibrate(manifest, out_path, seed, n_threads);
        if (coverage->parsed())
            return run_coverage(config_path, out_path, seed, seed_given, n_threads);
        if (upper->parsed())
            return run_upper_cl(config_path, data_path, query_path, out_path);
        if (optimize->parsed())
            return run_optimize(config_path, objective_name, out_prefix, seed, seed_given);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
