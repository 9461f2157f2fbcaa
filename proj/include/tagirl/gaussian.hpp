// Gaussian moment algebra shared by the inference engine and the agents.
//
// Every quantity is a (mean, variance) pair with diagonal covariance. Any
// cross-covariance the caller needs is passed around as an explicit scalar.
#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tagirl {

/// Raised when conditioning on an observation with zero total variance.
class DegenerateObservation : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Raised when a posterior variance comes out negative beyond round-off.
class NumericalConsistencyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class GaussianVariable {
  public:
    GaussianVariable() = default;
    GaussianVariable(double mean, double variance);

    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return variance_; }

    friend bool operator==(const GaussianVariable&,
                           const GaussianVariable&) = default;

  private:
    double mean_ = 0.0;
    double variance_ = 0.0;
};

/// Independent Gaussians stored as parallel mean/variance arrays.
class GaussianVector {
  public:
    GaussianVector() = default;
    GaussianVector(std::vector<double> means, std::vector<double> variances);

    std::size_t size() const noexcept { return means_.size(); }
    bool empty() const noexcept { return means_.empty(); }

    double mean(std::size_t i) const { return means_.at(i); }
    double variance(std::size_t i) const { return variances_.at(i); }
    GaussianVariable operator[](std::size_t i) const {
        return {means_.at(i), variances_.at(i)};
    }

    std::span<const double> means() const noexcept { return means_; }
    std::span<const double> variances() const noexcept { return variances_; }

    friend bool operator==(const GaussianVector&,
                           const GaussianVector&) = default;

  private:
    std::vector<double> means_;
    std::vector<double> variances_;
};

/// Moment-matched Gaussian for the product of two independent Gaussians.
GaussianVariable gma_product(GaussianVariable x, GaussianVariable y);

/// sum_i c_i X_i + offset, all terms independent.
GaussianVariable linear_combination(std::span<const double> coeffs,
                                    const GaussianVector& xs,
                                    GaussianVariable offset);

struct Linearized {
    GaussianVariable activation;
    double jacobian = 0.0;
};

/// ReLU linearized at the mean. A mean of exactly zero counts as inactive.
Linearized relu_linearized(GaussianVariable z);
Linearized identity_linearized(GaussianVariable z);

/// Conditions X on a scalar observation y = Y + v, where Y ~ `predicted` is
/// jointly Gaussian with X through `cross_cov` and v ~ N(0, obs_variance).
GaussianVariable condition_on_scalar(GaussianVariable prior, double cross_cov,
                                     double obs_mean, double obs_variance,
                                     double pred_mean, double pred_variance);

/// Applies the negative-variance policy: values below zero but within
/// 1e-9 * prior_variance are clamped to zero, anything lower throws
/// NumericalConsistencyError. `what` names the quantity in the message.
double clamp_posterior_variance(double posterior, double prior_variance,
                                const char* what = "posterior");

inline constexpr double kVarianceClampTolerance = 1e-9;

}  // namespace tagirl
