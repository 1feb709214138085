#ifndef UPCL_UQ_HPP
#define UPCL_UQ_HPP

#include <vector>

#include <Eigen/Dense>

#include "upcl/gp.hpp"
#include "upcl/kernels.hpp"

namespace upcl {

// Constants entering the uniform confidence limit: the universal constant C0,
// the significance parameter t, the spectral moment A0, the domain diameter,
// the dimension, and the prior standard deviation.
struct UqConstants {
    double c0 = 1.0;
    double t = 2.448;
    double a0 = 1.0;
    double d_omega = 1.0;
    int p = 1;
    double sigma = 1.0;

    double bound_factor() const;                  // C0 * sqrt(p * (1 v log(A0*D)))
    double level() const;                         // 1 - exp(-t^2/2)
    static UqConstants from(const ProductKernel& kernel, const Domain& domain,
                            double t, double c0 = 1.0);
};

// t with tail mass exp(-t^2/2) = alpha; alpha = 0.05 gives 2.4477.
double t_for_level(double alpha);

// 0.95 standard-normal quantile used by the naive interval.
inline constexpr double kNaiveQuantile = 1.6448536;

// Uniform confidence upper limit at x:
// mu + s*sqrt(log(e*sigma/s)) * (bound_factor + t), with s = 0 giving mu.
double upper_cl(const Eigen::VectorXd& x, const UqConstants& consts, const GpPosterior& post);

// Vectorized UpperCL over candidate rows.
Eigen::VectorXd upper_cl_many(const Eigen::MatrixXd& candidates, const UqConstants& consts,
                              const GpPosterior& post);

// Membership mask of the confidence region for the maximizer:
// mask[i] = UpperCL(candidate_i) >= observed_max.
std::vector<bool> confidence_region(const Eigen::MatrixXd& candidates, const UqConstants& consts,
                                    const GpPosterior& post, double observed_max);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

// Confidence interval for the maximum value: [max observed, max UpperCL].
// The maximum is taken over the candidate sweep; when a domain is supplied,
// the top candidates are additionally polished by a derivative-free
// coordinate descent (shrinking steps, `polish_evals` evaluations each).
Interval confidence_interval(const UqConstants& consts, const GpPosterior& post,
                             const Eigen::MatrixXd& candidates,
                             const Domain* domain = nullptr,
                             int polish_top = 5, int polish_evals = 100);

// Naive pointwise 95% interval: [max observed, max mu + 1.6448536 * s],
// searched the same way as confidence_interval.
Interval naive_interval(const GpPosterior& post, const Eigen::MatrixXd& candidates,
                        const Domain* domain = nullptr,
                        int polish_top = 5, int polish_evals = 100);

// k-nearest-neighbour summary of a region mask: majority vote over the k
// closest candidates answers membership at unseen points.
class RegionKnnSummary {
public:
    RegionKnnSummary(Eigen::MatrixXd candidates, std::vector<bool> mask, int k);

    bool predict(const Eigen::VectorXd& x) const;
    int k() const { return k_; }
    const Eigen::MatrixXd& candidates() const { return candidates_; }
    const std::vector<bool>& mask() const { return mask_; }

private:
    Eigen::MatrixXd candidates_;
    std::vector<bool> mask_;
    int k_;
};

} // namespace upcl

#endif
