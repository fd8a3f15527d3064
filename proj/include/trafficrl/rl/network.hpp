#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "trafficrl/random.hpp"

namespace trafficrl::rl {

/// Fully connected layer. `weights` is inputs x outputs, row-major, so that
/// z[o] = b[o] + sum_k x[k] * weights[k * outputs + o].
struct DenseLayer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;
    std::vector<double> biases;

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// MLP Q-function: ReLU after every hidden layer, linear output layer.
class QNetwork {
public:
    QNetwork() = default;

    // All parameters zero.
    explicit QNetwork(std::vector<std::size_t> dims);

    // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
    static QNetwork glorot_uniform(std::vector<std::size_t> dims, Rng& rng);

    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t input_size() const { return dims_.front(); }
    std::size_t output_size() const { return dims_.back(); }

    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

    std::vector<double> forward(std::span<const double> x) const;

    // `x` holds `rows` inputs back to back; `out` receives rows x output_size.
    void forward_batch(std::span<const double> x, std::size_t rows, std::vector<double>& out) const;

    bool all_finite() const;
    std::size_t parameter_count() const;

    friend bool operator==(const QNetwork&, const QNetwork&) = default;

private:
    std::vector<std::size_t> dims_;
    std::vector<DenseLayer> layers_;
};

// Same shapes as the network's layers.
using Gradients = std::vector<DenseLayer>;

Gradients zero_gradients(const QNetwork& net);

/// Mean squared TD error on the taken actions only:
///   L = (1/B) sum_i (Q(s_i, a_i) - y_i)^2
/// Writes dL/dtheta into `grad` when non-null. Returns L.
double masked_mse_loss(const QNetwork& net, std::span<const double> states, std::span<const int> actions,
                       std::span<const double> targets, Gradients* grad);

class Adam {
public:
    struct Options {
        double lr = 1e-3;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double epsilon = 1e-8;
    };

    Adam() = default;
    Adam(const QNetwork& net, Options options);

    void step(QNetwork& net, const Gradients& grad);
    long steps() const { return t_; }
    const Options& options() const { return options_; }

private:
    Options options_;
    long t_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

}  // namespace trafficrl::rl
