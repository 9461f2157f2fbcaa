// Fully-connected TAGI network.
//
// Parameters carry a mean and a variance each (diagonal covariance). The
// forward pass propagates moments layer by layer and records what the
// backward update needs; the update conditions one output unit on a scalar
// observation and smooths the innovation back through hidden layers into
// the weights and biases. No gradients are involved.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tagirl/gaussian.hpp"
#include "tagirl/random.hpp"
#include "tagirl/td_target.hpp"

namespace tagirl {

enum class Activation : std::uint8_t { relu = 0, identity = 1 };

std::string to_string(Activation activation);
Activation activation_from_string(const std::string& name);

struct LayerSpec {
    std::size_t input_width = 0;
    std::size_t output_width = 0;
    Activation activation = Activation::identity;

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Weights are stored row-major: weight(j, i) connects input i to unit j.
struct LayerParameters {
    LayerSpec spec;
    std::vector<double> weight_means;
    std::vector<double> weight_variances;
    std::vector<double> bias_means;
    std::vector<double> bias_variances;

    std::size_t weight_index(std::size_t unit, std::size_t input) const {
        return unit * spec.input_width + input;
    }

    friend bool operator==(const LayerParameters&,
                           const LayerParameters&) = default;
};

class NetworkParameters {
  public:
    NetworkParameters() = default;
    /// Validates shapes, chaining and variance signs.
    explicit NetworkParameters(std::vector<LayerParameters> layers);

    const std::vector<LayerParameters>& layers() const noexcept {
        return layers_;
    }
    std::size_t layer_count() const noexcept { return layers_.size(); }
    std::size_t input_width() const;
    std::size_t output_width() const;
    std::size_t parameter_count() const noexcept;
    std::vector<LayerSpec> specs() const;

    friend bool operator==(const NetworkParameters&,
                           const NetworkParameters&) = default;

  private:
    std::vector<LayerParameters> layers_;
};

/// Moments recorded for one layer during the forward pass.
struct LayerTrace {
    std::vector<double> z_means;
    std::vector<double> z_variances;
    std::vector<double> a_means;
    std::vector<double> a_variances;
    std::vector<double> jacobians;
};

struct ActivationTrace {
    std::vector<double> input;  // observed state, zero variance
    std::vector<LayerTrace> layers;
};

struct ForwardResult {
    GaussianVector q;
    ActivationTrace trace;
};

/// Thrown when a forward pass produces a non-finite moment.
class PropagationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Weight means ~ N(0, 1/fan_in); weight and bias variances 1/fan_in; bias
/// means zero.
NetworkParameters init_parameters(std::span<const LayerSpec> specs,
                                  std::uint64_t seed);

ForwardResult forward(const NetworkParameters& params,
                      std::span<const double> state);

/// One independent draw per output component.
std::vector<double> sample_output(const GaussianVector& q, std::uint64_t seed);
std::vector<double> sample_output(const GaussianVector& q, Rng& rng);

/// Posterior of output unit `action` after observing `target`.
GaussianVariable infer_output(const GaussianVector& q, std::size_t action,
                              TDTarget target);

NetworkParameters update(const NetworkParameters& params,
                         const ActivationTrace& trace, std::size_t action,
                         TDTarget target);

}  // namespace tagirl
