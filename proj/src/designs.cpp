#include "upcl/designs.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "upcl/rng.hpp"

namespace upcl {

namespace {

constexpr int kPrimes[25] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                             43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

// Radical inverse of i (i >= 1) in base b.
double radical_inverse(int i, int b) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= b;
        r += f * (i % b);
        i /= b;
    }
    return r;
}

double min_pairwise_distance(const Eigen::MatrixXd& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < pts.rows(); ++i)
        for (int j = i + 1; j < pts.rows(); ++j)
            best = std::min(best, (pts.row(i) - pts.row(j)).norm());
    return best;
}

} // namespace

Eigen::MatrixXd halton(int n, int p) {
    if (n < 1) throw std::invalid_argument("halton: n must be >= 1");
    if (p < 1 || p > 25)
        throw std::invalid_argument("halton: p must be in [1, 25] (first 25 primes)");
    Eigen::MatrixXd pts(n, p);
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < p; ++d)
            pts(i, d) = radical_inverse(i + 1, kPrimes[d]);
    return pts;
}

Eigen::MatrixXd latin_hypercube(int n, int p, std::uint64_t seed, int maximin_candidates) {
    if (n < 2) throw std::invalid_argument("latin_hypercube: n must be >= 2");
    if (p < 1) throw std::invalid_argument("latin_hypercube: p must be >= 1");
    if (maximin_candidates < 1) maximin_candidates = 1;

    auto rng = make_engine(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<int> perm(static_cast<std::size_t>(n));
    Eigen::MatrixXd candidate(n, p), best(n, p);
    double best_score = -1.0;
    for (int c = 0; c < maximin_candidates; ++c) {
        for (int d = 0; d < p; ++d) {
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            for (int i = 0; i < n; ++i)
                candidate(i, d) = (perm[static_cast<std::size_t>(i)] + unif(rng)) / n;
        }
        double score = min_pairwise_distance(candidate);
        if (score > best_score) {
            best_score = score;
            best = candidate;
        }
    }
    return best;
}

Eigen::MatrixXd uniform_random(int n, int p, std::uint64_t seed) {
    if (n < 1 || p < 1) throw std::invalid_argument("uniform_random: n, p must be >= 1");
    auto rng = make_engine(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXd pts(n, p);
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < p; ++d) pts(i, d) = unif(rng);
    return pts;
}

Eigen::MatrixXd map_to_domain(const Eigen::MatrixXd& unit_points, const Domain& d) {
    if (unit_points.cols() != d.dim())
        throw std::invalid_argument("map_to_domain: dimension mismatch");
    Eigen::MatrixXd out = unit_points;
    for (int j = 0; j < out.cols(); ++j)
        out.col(j) = d.lower[j] + (d.upper[j] - d.lower[j]) * out.col(j).array();
    return out;
}

Eigen::MatrixXd grid_mesh(int per_dim, int p) {
    if (per_dim < 2 || p < 1) throw std::invalid_argument("grid_mesh: need per_dim >= 2, p >= 1");
    long long total = 1;
    for (int d = 0; d < p; ++d) total *= per_dim;
    Eigen::MatrixXd pts(total, p);
    for (long long i = 0; i < total; ++i) {
        long long rem = i;
        for (int d = p - 1; d >= 0; --d) {
            pts(i, d) = static_cast<double>(rem % per_dim) / (per_dim - 1);
            rem /= per_dim;
        }
    }
    return pts;
}

} // namespace upcl
