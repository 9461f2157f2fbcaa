#include "tagirl/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace tagirl {

std::string to_string(Activation activation) {
    switch (activation) {
    case Activation::relu:
        return "relu";
    case Activation::identity:
        return "identity";
    }
    throw std::invalid_argument("unknown activation");
}

Activation activation_from_string(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "identity") return Activation::identity;
    throw std::invalid_argument("unknown activation '" + name + "'");
}

namespace {

void check_chain(std::span<const LayerSpec> specs) {
    if (specs.empty()) {
        throw std::invalid_argument("network needs at least one layer");
    }
    for (std::size_t l = 0; l < specs.size(); ++l) {
        if (specs[l].input_width == 0 || specs[l].output_width == 0) {
            throw std::invalid_argument("layer " + std::to_string(l) +
                                        " has zero width");
        }
        if (l > 0 && specs[l - 1].output_width != specs[l].input_width) {
            std::ostringstream msg;
            msg << "layer " << l << " expects " << specs[l].input_width
                << " inputs but layer " << l - 1 << " produces "
                << specs[l - 1].output_width;
            throw std::invalid_argument(msg.str());
        }
    }
}

void check_variances(const std::vector<double>& v, std::size_t layer,
                     const char* what) {
    for (double x : v) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw std::invalid_argument("layer " + std::to_string(layer) +
                                        ": invalid " + what);
        }
    }
}

void check_means(const std::vector<double>& v, std::size_t layer,
                 const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument("layer " + std::to_string(layer) +
                                        ": non-finite " + what);
        }
    }
}

}  // namespace

NetworkParameters::NetworkParameters(std::vector<LayerParameters> layers)
    : layers_(std::move(layers)) {
    std::vector<LayerSpec> chain = specs();
    check_chain(chain);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        const std::size_t nw = layer.spec.input_width * layer.spec.output_width;
        if (layer.weight_means.size() != nw ||
            layer.weight_variances.size() != nw ||
            layer.bias_means.size() != layer.spec.output_width ||
            layer.bias_variances.size() != layer.spec.output_width) {
            throw std::invalid_argument("layer " + std::to_string(l) +
                                        ": parameter arrays do not match "
                                        "its widths");
        }
        check_means(layer.weight_means, l, "weight mean");
        check_means(layer.bias_means, l, "bias mean");
        check_variances(layer.weight_variances, l, "weight variance");
        check_variances(layer.bias_variances, l, "bias variance");
    }
}

std::size_t NetworkParameters::input_width() const {
    if (layers_.empty()) throw std::logic_error("empty network");
    return layers_.front().spec.input_width;
}

std::size_t NetworkParameters::output_width() const {
    if (layers_.empty()) throw std::logic_error("empty network");
    return layers_.back().spec.output_width;
}

std::size_t NetworkParameters::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& layer : layers_) {
        n += layer.weight_means.size() + layer.bias_means.size();
    }
    return n;
}

std::vector<LayerSpec> NetworkParameters::specs() const {
    std::vector<LayerSpec> out;
    out.reserve(layers_.size());
    for (const auto& layer : layers_) out.push_back(layer.spec);
    return out;
}

NetworkParameters init_parameters(std::span<const LayerSpec> specs,
                                  std::uint64_t seed) {
    check_chain(specs);
    Rng rng(seed);
    std::normal_distribution<double> standard(0.0, 1.0);
    std::vector<LayerParameters> layers;
    layers.reserve(specs.size());
    for (const auto& spec : specs) {
        const double variance = 1.0 / static_cast<double>(spec.input_width);
        const double scale = std::sqrt(variance);
        LayerParameters layer;
        layer.spec = spec;
        const std::size_t nw = spec.input_width * spec.output_width;
        layer.weight_means.resize(nw);
        for (auto& w : layer.weight_means) w = scale * standard(rng);
        layer.weight_variances.assign(nw, variance);
        layer.bias_means.assign(spec.output_width, 0.0);
        layer.bias_variances.assign(spec.output_width, variance);
        layers.push_back(std::move(layer));
    }
    return NetworkParameters(std::move(layers));
}

ForwardResult forward(const NetworkParameters& params,
                      std::span<const double> state) {
    if (params.layer_count() == 0) {
        throw std::invalid_argument("forward: empty network");
    }
    if (state.size() != params.input_width()) {
        std::ostringstream msg;
        msg << "forward: state has " << state.size()
            << " components, network expects " << params.input_width();
        throw std::invalid_argument(msg.str());
    }
    for (double s : state) {
        if (!std::isfinite(s)) {
            throw std::invalid_argument("forward: state is not finite");
        }
    }

    ActivationTrace trace;
    trace.input.assign(state.begin(), state.end());
    trace.layers.reserve(params.layer_count());

    std::vector<double> in_means(state.begin(), state.end());
    std::vector<double> in_vars(state.size(), 0.0);

    for (std::size_t l = 0; l < params.layer_count(); ++l) {
        const LayerParameters& layer = params.layers()[l];
        const std::size_t n_in = layer.spec.input_width;
        const std::size_t n_out = layer.spec.output_width;
        LayerTrace lt;
        lt.z_means.resize(n_out);
        lt.z_variances.resize(n_out);
        lt.a_means.resize(n_out);
        lt.a_variances.resize(n_out);
        lt.jacobians.resize(n_out);

        for (std::size_t j = 0; j < n_out; ++j) {
            const double* mw = &layer.weight_means[j * n_in];
            const double* sw = &layer.weight_variances[j * n_in];
            double mean = layer.bias_means[j];
            double var = layer.bias_variances[j];
            for (std::size_t i = 0; i < n_in; ++i) {
                // Same moments as gma_product(w, a), summed as in
                // linear_combination with unit coefficients.
                const double ma = in_means[i];
                const double sa = in_vars[i];
                mean += mw[i] * ma;
                var += sw[i] * sa + sw[i] * ma * ma + mw[i] * mw[i] * sa;
            }
            if (!std::isfinite(mean) || !std::isfinite(var)) {
                throw PropagationError("forward: non-finite moment in layer " +
                                       std::to_string(l) + ", unit " +
                                       std::to_string(j));
            }
            const GaussianVariable z(mean, var);
            const Linearized act = layer.spec.activation == Activation::relu
                                       ? relu_linearized(z)
                                       : identity_linearized(z);
            lt.z_means[j] = mean;
            lt.z_variances[j] = var;
            lt.a_means[j] = act.activation.mean();
            lt.a_variances[j] = act.activation.variance();
            lt.jacobians[j] = act.jacobian;
        }
        in_means = lt.a_means;
        in_vars = lt.a_variances;
        trace.layers.push_back(std::move(lt));
    }

    const LayerTrace& last = trace.layers.back();
    GaussianVector q(last.a_means, last.a_variances);
    return {std::move(q), std::move(trace)};
}

std::vector<double> sample_output(const GaussianVector& q, Rng& rng) {
    std::normal_distribution<double> standard(0.0, 1.0);
    std::vector<double> draws(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        // Always consume a draw so the stream position does not depend on
        // the variances.
        const double eps = standard(rng);
        const double var = q.variance(i);
        draws[i] = var > 0.0 ? q.mean(i) + std::sqrt(var) * eps : q.mean(i);
    }
    return draws;
}

std::vector<double> sample_output(const GaussianVector& q,
                                  std::uint64_t seed) {
    Rng rng(seed);
    return sample_output(q, rng);
}

GaussianVariable infer_output(const GaussianVector& q, std::size_t action,
                              TDTarget target) {
    if (action >= q.size()) {
        throw std::out_of_range("infer_output: action index out of range");
    }
    const GaussianVariable prior = q[action];
    return condition_on_scalar(prior, prior.variance(), target.mean,
                               target.noise_variance, prior.mean(),
                               prior.variance());
}

namespace {

void check_trace(const NetworkParameters& params,
                 const ActivationTrace& trace) {
    if (trace.layers.size() != params.layer_count() ||
        trace.input.size() != params.input_width()) {
        throw std::invalid_argument(
            "update: trace does not belong to these parameters");
    }
    for (std::size_t l = 0; l < params.layer_count(); ++l) {
        const std::size_t n = params.layers()[l].spec.output_width;
        const LayerTrace& lt = trace.layers[l];
        if (lt.z_means.size() != n || lt.z_variances.size() != n ||
            lt.a_means.size() != n || lt.a_variances.size() != n ||
            lt.jacobians.size() != n) {
            throw std::invalid_argument("update: trace layer " +
                                        std::to_string(l) +
                                        " does not match parameter widths");
        }
    }
}

}  // namespace

NetworkParameters update(const NetworkParameters& params,
                         const ActivationTrace& trace, std::size_t action,
                         TDTarget target) {
    check_trace(params, trace);
    if (action >= params.output_width()) {
        throw std::out_of_range("update: action index out of range");
    }
    if (!(target.noise_variance >= 0.0) ||
        !std::isfinite(target.noise_variance) || !std::isfinite(target.mean)) {
        throw std::invalid_argument(
            "update: target noise variance must be finite and non-negative");
    }

    std::vector<LayerParameters> layers = params.layers();
    const std::size_t depth = layers.size();

    // Innovation on the pre-activations of the layer being processed:
    // posterior minus prior, for means and variances.
    const std::size_t n_out = layers.back().spec.output_width;
    std::vector<double> delta_mean(n_out, 0.0);
    std::vector<double> delta_var(n_out, 0.0);
    {
        const LayerTrace& out = trace.layers.back();
        const GaussianVariable z(out.z_means[action], out.z_variances[action]);
        const double cross = out.jacobians[action] * z.variance();
        const GaussianVariable post = condition_on_scalar(
            z, cross, target.mean, target.noise_variance, out.a_means[action],
            out.a_variances[action]);
        delta_mean[action] = post.mean() - z.mean();
        delta_var[action] = post.variance() - z.variance();
    }

    for (std::size_t l = depth; l-- > 0;) {
        LayerParameters& layer = layers[l];
        const LayerTrace& lt = trace.layers[l];
        const std::size_t n_in = layer.spec.input_width;
        const std::size_t n_units = layer.spec.output_width;

        // Smoother gains are cross_cov / prior_var(z); fold the division in.
        std::vector<double> mean_ratio(n_units, 0.0);
        std::vector<double> var_ratio(n_units, 0.0);
        for (std::size_t j = 0; j < n_units; ++j) {
            const double sz = lt.z_variances[j];
            if (sz > 0.0) {
                mean_ratio[j] = delta_mean[j] / sz;
                var_ratio[j] = delta_var[j] / (sz * sz);
            }
        }

        const std::vector<double>& in_means =
            l == 0 ? trace.input : trace.layers[l - 1].a_means;

        // Hidden-state innovations for the layer below, using prior weights.
        std::vector<double> below_mean;
        std::vector<double> below_var;
        if (l > 0) {
            const LayerTrace& prev = trace.layers[l - 1];
            below_mean.assign(n_in, 0.0);
            below_var.assign(n_in, 0.0);
            for (std::size_t j = 0; j < n_units; ++j) {
                if (mean_ratio[j] == 0.0 && var_ratio[j] == 0.0) continue;
                const double* mw = &layer.weight_means[j * n_in];
                for (std::size_t i = 0; i < n_in; ++i) {
                    const double cross =
                        mw[i] * prev.jacobians[i] * prev.z_variances[i];
                    below_mean[i] += cross * mean_ratio[j];
                    below_var[i] += cross * cross * var_ratio[j];
                }
            }
            for (std::size_t i = 0; i < n_in; ++i) {
                // The diagonal approximation can overshoot when many units
                // share one input; the posterior variance floors at zero.
                below_var[i] = std::max(below_var[i], -prev.z_variances[i]);
            }
        }

        for (std::size_t j = 0; j < n_units; ++j) {
            const double rm = mean_ratio[j];
            const double rv = var_ratio[j];
            if (rm == 0.0 && rv == 0.0) continue;
            double* mw = &layer.weight_means[j * n_in];
            double* sw = &layer.weight_variances[j * n_in];
            for (std::size_t i = 0; i < n_in; ++i) {
                const double cross = in_means[i] * sw[i];
                const double prior_var = sw[i];
                mw[i] += cross * rm;
                sw[i] = clamp_posterior_variance(prior_var + cross * cross * rv,
                                                 prior_var, "weight");
            }
            const double cross = layer.bias_variances[j];
            layer.bias_means[j] += cross * rm;
            layer.bias_variances[j] = clamp_posterior_variance(
                cross + cross * cross * rv, cross, "bias");
        }

        delta_mean = std::move(below_mean);
        delta_var = std::move(below_var);
    }

    return NetworkParameters(std::move(layers));
}

}  // namespace tagirl
