#include "trafficrl/rl/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace trafficrl::rl {

namespace {

void check_dims(const std::vector<std::size_t>& dims) {
    if (dims.size() < 2) throw std::invalid_argument("network needs at least input and output sizes");
    for (auto d : dims) {
        if (d == 0) throw std::invalid_argument("layer sizes must be positive");
    }
}

// z (rows x out) = x (rows x in) * W + b, then ReLU when `hidden`.
void dense_forward(const DenseLayer& layer, const double* x, std::size_t rows, double* z, bool hidden) {
    const std::size_t in = layer.inputs;
    const std::size_t out = layer.outputs;
    const double* w = layer.weights.data();
    const double* b = layer.biases.data();
    for (std::size_t i = 0; i < rows; ++i) {
        double* zi = z + i * out;
        const double* xi = x + i * in;
        std::copy(b, b + out, zi);
        for (std::size_t k = 0; k < in; ++k) {
            const double xv = xi[k];
            if (xv == 0.0) continue;
            const double* wk = w + k * out;
            for (std::size_t o = 0; o < out; ++o) zi[o] += xv * wk[o];
        }
        if (hidden) {
            for (std::size_t o = 0; o < out; ++o) zi[o] = zi[o] > 0.0 ? zi[o] : 0.0;
        }
    }
}

}  // namespace

QNetwork::QNetwork(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    check_dims(dims_);
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        DenseLayer layer;
        layer.inputs = dims_[l];
        layer.outputs = dims_[l + 1];
        layer.weights.assign(layer.inputs * layer.outputs, 0.0);
        layer.biases.assign(layer.outputs, 0.0);
        layers_.push_back(std::move(layer));
    }
}

QNetwork QNetwork::glorot_uniform(std::vector<std::size_t> dims, Rng& rng) {
    QNetwork net(std::move(dims));
    for (auto& layer : net.layers_) {
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.inputs + layer.outputs));
        for (auto& w : layer.weights) w = rng.uniform(-limit, limit);
    }
    return net;
}

std::vector<double> QNetwork::forward(std::span<const double> x) const {
    std::vector<double> out;
    forward_batch(x, 1, out);
    return out;
}

void QNetwork::forward_batch(std::span<const double> x, std::size_t rows, std::vector<double>& out) const {
    if (x.size() != rows * input_size()) {
        throw std::invalid_argument("input size " + std::to_string(x.size()) + " does not match " +
                                    std::to_string(rows) + " x " + std::to_string(input_size()));
    }
    std::vector<double> a(x.begin(), x.end());
    std::vector<double> z;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        z.resize(rows * layers_[l].outputs);
        dense_forward(layers_[l], a.data(), rows, z.data(), l + 1 < layers_.size());
        a.swap(z);
    }
    out = std::move(a);
}

bool QNetwork::all_finite() const {
    for (const auto& layer : layers_) {
        for (double w : layer.weights) {
            if (!std::isfinite(w)) return false;
        }
        for (double b : layer.biases) {
            if (!std::isfinite(b)) return false;
        }
    }
    return true;
}

std::size_t QNetwork::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += layer.weights.size() + layer.biases.size();
    return n;
}

Gradients zero_gradients(const QNetwork& net) {
    Gradients g = net.layers();
    for (auto& layer : g) {
        std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
        std::fill(layer.biases.begin(), layer.biases.end(), 0.0);
    }
    return g;
}

double masked_mse_loss(const QNetwork& net, std::span<const double> states, std::span<const int> actions,
                       std::span<const double> targets, Gradients* grad) {
    const std::size_t rows = actions.size();
    const auto& layers = net.layers();
    const std::size_t n_layers = layers.size();
    if (rows == 0 || targets.size() != rows || states.size() != rows * net.input_size()) {
        throw std::invalid_argument("batch arrays disagree in size");
    }

    // activations[0] is the input; activations[l + 1] is layer l's output (post-ReLU for hidden).
    std::vector<std::vector<double>> activations(n_layers + 1);
    activations[0].assign(states.begin(), states.end());
    for (std::size_t l = 0; l < n_layers; ++l) {
        activations[l + 1].resize(rows * layers[l].outputs);
        dense_forward(layers[l], activations[l].data(), rows, activations[l + 1].data(), l + 1 < n_layers);
    }

    const std::size_t n_out = net.output_size();
    const auto& q = activations[n_layers];
    std::vector<double> delta(rows * n_out, 0.0);
    double loss = 0.0;
    const double scale = 2.0 / static_cast<double>(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto a = static_cast<std::size_t>(actions[i]);
        if (a >= n_out) throw std::invalid_argument("action index out of range");
        const double err = q[i * n_out + a] - targets[i];
        loss += err * err;
        delta[i * n_out + a] = scale * err;
    }
    loss /= static_cast<double>(rows);
    if (grad == nullptr) return loss;

    if (grad->size() != n_layers) *grad = zero_gradients(net);
    std::vector<double> delta_prev;
    for (std::size_t l = n_layers; l-- > 0;) {
        const auto& layer = layers[l];
        auto& g = (*grad)[l];
        const std::size_t in = layer.inputs;
        const std::size_t out = layer.outputs;
        std::fill(g.weights.begin(), g.weights.end(), 0.0);
        std::fill(g.biases.begin(), g.biases.end(), 0.0);
        const auto& input = activations[l];

        for (std::size_t i = 0; i < rows; ++i) {
            const double* di = delta.data() + i * out;
            const double* xi = input.data() + i * in;
            for (std::size_t o = 0; o < out; ++o) g.biases[o] += di[o];
            for (std::size_t k = 0; k < in; ++k) {
                const double xv = xi[k];
                if (xv == 0.0) continue;
                double* gk = g.weights.data() + k * out;
                for (std::size_t o = 0; o < out; ++o) gk[o] += xv * di[o];
            }
        }
        if (l == 0) break;

        // Back through W and the ReLU that produced `input`.
        delta_prev.assign(rows * in, 0.0);
        for (std::size_t i = 0; i < rows; ++i) {
            const double* di = delta.data() + i * out;
            const double* xi = input.data() + i * in;
            double* dp = delta_prev.data() + i * in;
            for (std::size_t k = 0; k < in; ++k) {
                if (xi[k] <= 0.0) continue;
                const double* wk = layer.weights.data() + k * out;
                double s = 0.0;
                for (std::size_t o = 0; o < out; ++o) s += wk[o] * di[o];
                dp[k] = s;
            }
        }
        delta.swap(delta_prev);
    }
    return loss;
}

Adam::Adam(const QNetwork& net, Options options) : options_(options) {
    for (const auto& layer : net.layers()) {
        m_.emplace_back(layer.weights.size() + layer.biases.size(), 0.0);
        v_.emplace_back(layer.weights.size() + layer.biases.size(), 0.0);
    }
}

void Adam::step(QNetwork& net, const Gradients& grad) {
    auto& layers = net.layers();
    if (grad.size() != layers.size() || m_.size() != layers.size()) {
        throw std::invalid_argument("gradient shape does not match network");
    }
    ++t_;
    const double b1 = options_.beta1;
    const double b2 = options_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    const double lr = options_.lr;
    const double eps = options_.epsilon;

    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto update = [&](std::vector<double>& theta, const std::vector<double>& g, std::size_t offset) {
            double* m = m_[l].data() + offset;
            double* v = v_[l].data() + offset;
            for (std::size_t j = 0; j < theta.size(); ++j) {
                m[j] = b1 * m[j] + (1.0 - b1) * g[j];
                v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
                const double m_hat = m[j] / c1;
                const double v_hat = v[j] / c2;
                theta[j] -= lr * m_hat / (std::sqrt(v_hat) + eps);
            }
        };
        update(layers[l].weights, grad[l].weights, 0);
        update(layers[l].biases, grad[l].biases, layers[l].weights.size());
    }
}

}  // namespace trafficrl::rl
