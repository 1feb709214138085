#ifndef UPCL_DETAIL_POLISH_HPP
#define UPCL_DETAIL_POLISH_HPP

#include <functional>
#include <utility>

#include <Eigen/Dense>

#include "upcl/kernels.hpp"

namespace upcl::detail {

// Derivative-free coordinate ascent from x0: tries +/- step along each axis
// (clamped to the domain), keeps improvements, halves all steps when a full
// pass stalls.  Stops when the evaluation budget is spent or steps shrink
// below min_step_frac of the domain range.  Returns the best point found.
inline std::pair<Eigen::VectorXd, double> coordinate_polish(
    Eigen::VectorXd x0, double f0,
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Domain& domain, int evals,
    double step_frac = 0.05, double min_step_frac = 1e-9) {
    Eigen::VectorXd range = domain.upper - domain.lower;
    Eigen::VectorXd step = step_frac * range;
    Eigen::VectorXd x = std::move(x0);
    double fx = f0;
    int budget = evals;
    while (budget > 0 && step.maxCoeff() > min_step_frac * range.maxCoeff()) {
        bool improved = false;
        for (int d = 0; d < x.size() && budget > 0; ++d) {
            for (double sgn : {+1.0, -1.0}) {
                if (budget <= 0) break;
                Eigen::VectorXd trial = x;
                trial[d] = std::min(std::max(trial[d] + sgn * step[d],
                                             domain.lower[d]), domain.upper[d]);
                double ft = f(trial);
                --budget;
                if (ft > fx) {
                    fx = ft;
                    x = trial;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return {x, fx};
}

} // namespace upcl::detail

#endif
