#pragma once

#include "quadtune/errors.hpp"

#include <random>
#include <span>
#include <string>
#include <vector>

// Dense feed-forward networks with reverse-mode gradients and Adam, enough
// for the actor/critic pair. Batched paths run on the dispatched kernels;
// the single-sample forward uses one fixed scalar evaluation order so that
// results are identical across kernel backends (the exported-policy
// reconstruction mirrors that order bit for bit).

namespace quadtune {

enum class Activation { tanh, linear, clipped_relu };

const char* activation_name(Activation a);          // UnsupportedActivation
Activation activation_from_name(const std::string&); // UnsupportedActivation

struct Layer {
    int in_dim = 0;
    int out_dim = 0;
    std::vector<double> weights; // row-major [out_dim][in_dim]
    std::vector<double> biases;  // [out_dim]
    Activation activation = Activation::linear;
    double clip_lo = -1.0; // used by clipped_relu only
    double clip_hi = 1.0;
};

struct DenseNet {
    std::vector<Layer> layers;

    int input_dim() const { return layers.empty() ? 0 : layers.front().in_dim; }
    int output_dim() const { return layers.empty() ? 0 : layers.back().out_dim; }
    std::size_t param_count() const;
    void validate() const; // DimensionMismatch on inconsistent shapes
};

// Fully connected net with uniform +-1/sqrt(fan_in) weights, zero biases.
DenseNet make_mlp(const std::vector<int>& dims,
                  const std::vector<Activation>& activations,
                  std::mt19937_64& rng);

// Single-sample forward, fixed scalar evaluation order.
std::vector<double> forward(const DenseNet& net, std::span<const double> x);

// Cached activations for a batched forward pass (row-major [batch][dim]).
struct BatchCache {
    int batch = 0;
    std::vector<std::vector<double>> pre;  // pre-activation per layer
    std::vector<std::vector<double>> post; // post-activation per layer

    const double* output() const { return post.back().data(); }
};

void forward_batch(const DenseNet& net, const double* x, int batch,
                   BatchCache& cache);

struct NetGradients {
    std::vector<std::vector<double>> dw; // per layer, shape of weights
    std::vector<std::vector<double>> db; // per layer, shape of biases
    std::vector<double> dx;              // [batch][input_dim] when requested
};

// Reverse pass for the batch cached in `cache`. `dy` is the upstream
// gradient on the network output, row-major [batch][out_dim].
void backward_batch(const DenseNet& net, const double* x, int batch,
                    const BatchCache& cache, const double* dy,
                    NetGradients& grads, bool want_param_grads,
                    bool want_input_grad);

struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double l2 = 1e-5; // applied to weights only, added to the raw gradient
    long step = 0;
    std::vector<std::vector<double>> mw, vw, mb, vb;

    void init(const DenseNet& net);
};

void adam_step(AdamState& state, DenseNet& net, const NetGradients& grads);

// target <- (1 - tau) * target + tau * source, parameter-wise.
void soft_update(DenseNet& target, const DenseNet& source, double tau);

} // namespace quadtune
