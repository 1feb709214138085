#ifndef UPCL_DESIGNS_HPP
#define UPCL_DESIGNS_HPP

#include <cstdint>

#include <Eigen/Dense>

#include "upcl/kernels.hpp"

namespace upcl {

// First n points of the Halton sequence in [0,1)^p, 1-indexed, using the
// first p primes as bases.  Rows 1..m of halton(n, p) equal halton(m, p).
Eigen::MatrixXd halton(int n, int p);

// Maximin Latin hypercube design on [0,1]^p: draws `maximin_candidates`
// random LHS designs (one point per stratum with uniform jitter) and keeps
// the one with the largest minimum pairwise distance.
Eigen::MatrixXd latin_hypercube(int n, int p, std::uint64_t seed,
                                int maximin_candidates = 1000);

// n i.i.d. Uniform[0,1]^p points.
Eigen::MatrixXd uniform_random(int n, int p, std::uint64_t seed);

// Affine map of unit-cube points onto a box domain, order preserved.
Eigen::MatrixXd map_to_domain(const Eigen::MatrixXd& unit_points, const Domain& d);

// Full-factorial mesh with `per_dim` levels per axis over the unit cube
// (rows ordered lexicographically, first coordinate slowest).
Eigen::MatrixXd grid_mesh(int per_dim, int p);

} // namespace upcl

#endif
