#pragma once

namespace tagirl {

/// Scalar observation of one Q-value: y ~ N(mean, noise_variance).
struct TDTarget {
    double mean = 0.0;
    double noise_variance = 0.0;

    friend bool operator==(const TDTarget&, const TDTarget&) = default;
};

}  // namespace tagirl
