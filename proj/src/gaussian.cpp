#include "tagirl/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tagirl {

namespace {

void require_finite(double value, const char* what) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument(std::string(what) + " is not finite");
    }
}

}  // namespace

GaussianVariable::GaussianVariable(double mean, double variance)
    : mean_(mean), variance_(variance) {
    require_finite(mean, "Gaussian mean");
    require_finite(variance, "Gaussian variance");
    if (variance < 0.0) {
        throw std::invalid_argument("Gaussian variance must be non-negative");
    }
}

GaussianVector::GaussianVector(std::vector<double> means,
                               std::vector<double> variances)
    : means_(std::move(means)), variances_(std::move(variances)) {
    if (means_.size() != variances_.size()) {
        throw std::invalid_argument(
            "GaussianVector: means and variances differ in length");
    }
    for (std::size_t i = 0; i < means_.size(); ++i) {
        require_finite(means_[i], "GaussianVector mean");
        require_finite(variances_[i], "GaussianVector variance");
        if (variances_[i] < 0.0) {
            throw std::invalid_argument(
                "GaussianVector: negative variance at index " +
                std::to_string(i));
        }
    }
}

GaussianVariable gma_product(GaussianVariable x, GaussianVariable y) {
    const double mx = x.mean(), my = y.mean();
    const double sx = x.variance(), sy = y.variance();
    return {mx * my, sx * sy + sx * my * my + sy * mx * mx};
}

GaussianVariable linear_combination(std::span<const double> coeffs,
                                    const GaussianVector& xs,
                                    GaussianVariable offset) {
    if (coeffs.size() != xs.size()) {
        throw std::invalid_argument(
            "linear_combination: coefficient count does not match inputs");
    }
    double mean = 0.0;
    double variance = 0.0;
    const auto means = xs.means();
    const auto variances = xs.variances();
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        mean += coeffs[i] * means[i];
        variance += coeffs[i] * coeffs[i] * variances[i];
    }
    return {mean + offset.mean(), variance + offset.variance()};
}

Linearized relu_linearized(GaussianVariable z) {
    if (z.mean() > 0.0) {
        return {z, 1.0};
    }
    return {GaussianVariable{0.0, 0.0}, 0.0};
}

Linearized identity_linearized(GaussianVariable z) { return {z, 1.0}; }

double clamp_posterior_variance(double posterior, double prior_variance,
                                const char* what) {
    if (posterior >= 0.0) {
        return posterior;
    }
    if (posterior >= -kVarianceClampTolerance * prior_variance) {
        return 0.0;
    }
    std::ostringstream msg;
    msg << what << " variance " << posterior
        << " is negative beyond round-off (prior variance " << prior_variance
        << ")";
    throw NumericalConsistencyError(msg.str());
}

GaussianVariable condition_on_scalar(GaussianVariable prior, double cross_cov,
                                     double obs_mean, double obs_variance,
                                     double pred_mean, double pred_variance) {
    if (obs_variance < 0.0 || pred_variance < 0.0) {
        throw std::invalid_argument(
            "condition_on_scalar: variances must be non-negative");
    }
    const double total = pred_variance + obs_variance;
    if (total == 0.0) {
        throw DegenerateObservation(
            "condition_on_scalar: predicted and observation variance are both "
            "zero");
    }
    // Cauchy-Schwarz, with slack for the rounding in the caller's products.
    const double bound = std::sqrt(prior.variance() * pred_variance);
    if (std::abs(cross_cov) > bound * (1.0 + 1e-9) + 1e-300) {
        throw std::invalid_argument(
            "condition_on_scalar: cross-covariance violates Cauchy-Schwarz");
    }
    const double gain = cross_cov / total;
    const double mean = prior.mean() + gain * (obs_mean - pred_mean);
    const double variance = clamp_posterior_variance(
        prior.variance() - gain * cross_cov, prior.variance());
    if (!std::isfinite(mean)) {
        throw NumericalConsistencyError("condition_on_scalar: non-finite mean");
    }
    return {mean, variance};
}

}  // namespace tagirl
