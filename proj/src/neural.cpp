#include "quadtune/neural.hpp"

#include "quadtune/kernels.hpp"

#include <cmath>
#include <cstring>

namespace quadtune {

const char* activation_name(Activation a) {
    switch (a) {
    case Activation::tanh: return "tanh";
    case Activation::linear: return "linear";
    case Activation::clipped_relu: return "clipped_relu";
    }
    throw UnsupportedActivation("unknown activation enum value");
}

Activation activation_from_name(const std::string& s) {
    if (s == "tanh") return Activation::tanh;
    if (s == "linear") return Activation::linear;
    if (s == "clipped_relu") return Activation::clipped_relu;
    throw UnsupportedActivation("unsupported activation: " + s);
}

std::size_t DenseNet::param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.biases.size();
    return n;
}

void DenseNet::validate() const {
    if (layers.empty()) throw DimensionMismatch("network has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (l.in_dim <= 0 || l.out_dim <= 0)
            throw DimensionMismatch("layer with non-positive dimensions");
        if (l.weights.size() != std::size_t(l.in_dim) * std::size_t(l.out_dim))
            throw DimensionMismatch("weight matrix size does not match layer dims");
        if (l.biases.size() != std::size_t(l.out_dim))
            throw DimensionMismatch("bias size does not match layer dims");
        if (i > 0 && layers[i - 1].out_dim != l.in_dim)
            throw DimensionMismatch("layer input does not match previous output");
        if (l.activation == Activation::clipped_relu && !(l.clip_lo < l.clip_hi))
            throw DimensionMismatch("clipped_relu bounds must satisfy lo < hi");
    }
}

DenseNet make_mlp(const std::vector<int>& dims,
                  const std::vector<Activation>& activations,
                  std::mt19937_64& rng) {
    if (dims.size() < 2 || activations.size() != dims.size() - 1)
        throw DimensionMismatch("make_mlp: need n+1 dims for n activations");
    DenseNet net;
    net.layers.resize(dims.size() - 1);
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        Layer& l = net.layers[i];
        l.in_dim = dims[i];
        l.out_dim = dims[i + 1];
        l.activation = activations[i];
        const double bound = 1.0 / std::sqrt(double(l.in_dim));
        std::uniform_real_distribution<double> u(-bound, bound);
        l.weights.resize(std::size_t(l.in_dim) * l.out_dim);
        for (double& w : l.weights) w = u(rng);
        l.biases.assign(std::size_t(l.out_dim), 0.0);
    }
    net.validate();
    return net;
}

namespace {

inline double apply_activation(const Layer& l, double z) {
    switch (l.activation) {
    case Activation::tanh: return std::tanh(z);
    case Activation::linear: return z;
    case Activation::clipped_relu:
        return std::min(l.clip_hi, std::max(l.clip_lo, z));
    }
    throw UnsupportedActivation("unknown activation enum value");
}

} // namespace

std::vector<double> forward(const DenseNet& net, std::span<const double> x) {
    net.validate();
    if (int(x.size()) != net.input_dim())
        throw DimensionMismatch("forward: input size does not match network");
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> next;
    for (const Layer& l : net.layers) {
        next.assign(std::size_t(l.out_dim), 0.0);
        for (int o = 0; o < l.out_dim; ++o) {
            const double* w = l.weights.data() + std::size_t(o) * l.in_dim;
            double acc = 0.0;
            for (int i = 0; i < l.in_dim; ++i) acc += w[i] * cur[std::size_t(i)];
            next[std::size_t(o)] = apply_activation(l, acc + l.biases[std::size_t(o)]);
        }
        cur.swap(next);
    }
    return cur;
}

void forward_batch(const DenseNet& net, const double* x, int batch,
                   BatchCache& cache) {
    if (batch <= 0) throw DimensionMismatch("forward_batch: batch must be positive");
    const std::size_t n_layers = net.layers.size();
    cache.batch = batch;
    cache.pre.resize(n_layers);
    cache.post.resize(n_layers);
    const double* input = x;
    for (std::size_t li = 0; li < n_layers; ++li) {
        const Layer& l = net.layers[li];
        auto& z = cache.pre[li];
        auto& y = cache.post[li];
        z.assign(std::size_t(batch) * l.out_dim, 0.0);
        // z = input * W^T, then add bias row-wise
        kernels::matmul_nt(z.data(), input, l.weights.data(), batch, l.out_dim,
                           l.in_dim);
        kernels::add_row_vector(z.data(), l.biases.data(), batch, l.out_dim);
        y.resize(z.size());
        switch (l.activation) {
        case Activation::tanh:
            for (std::size_t i = 0; i < z.size(); ++i) y[i] = std::tanh(z[i]);
            break;
        case Activation::linear:
            std::memcpy(y.data(), z.data(), z.size() * sizeof(double));
            break;
        case Activation::clipped_relu:
            for (std::size_t i = 0; i < z.size(); ++i)
                y[i] = std::min(l.clip_hi, std::max(l.clip_lo, z[i]));
            break;
        }
        input = y.data();
    }
}

void backward_batch(const DenseNet& net, const double* x, int batch,
                    const BatchCache& cache, const double* dy,
                    NetGradients& grads, bool want_param_grads,
                    bool want_input_grad) {
    const std::size_t n_layers = net.layers.size();
    if (cache.batch != batch || cache.post.size() != n_layers)
        throw DimensionMismatch("backward_batch: cache does not match batch");
    grads.dw.resize(n_layers);
    grads.db.resize(n_layers);

    std::vector<double> dz(cache.pre.back().size());
    std::memcpy(dz.data(), dy, dz.size() * sizeof(double));
    std::vector<double> dx;

    for (std::size_t li = n_layers; li-- > 0;) {
        const Layer& l = net.layers[li];
        switch (l.activation) {
        case Activation::tanh:
            kernels::tanh_backward(dz.data(), cache.post[li].data(), dz.size());
            break;
        case Activation::linear:
            break;
        case Activation::clipped_relu:
            kernels::clip_backward(dz.data(), cache.pre[li].data(), dz.size(),
                                   l.clip_lo, l.clip_hi);
            break;
        }
        const double* layer_in = (li == 0) ? x : cache.post[li - 1].data();
        if (want_param_grads) {
            grads.dw[li].assign(l.weights.size(), 0.0);
            grads.db[li].assign(l.biases.size(), 0.0);
            // dW = dz^T * X  -> [out_dim x in_dim]
            kernels::matmul_tn(grads.dw[li].data(), dz.data(), layer_in,
                               l.out_dim, l.in_dim, batch);
            kernels::col_sums(dz.data(), grads.db[li].data(), batch, l.out_dim);
        }
        if (li > 0 || want_input_grad) {
            dx.assign(std::size_t(batch) * l.in_dim, 0.0);
            // dX = dz * W  -> [batch x in_dim]
            kernels::matmul_nn(dx.data(), dz.data(), l.weights.data(), batch,
                               l.in_dim, l.out_dim);
            dz.swap(dx);
        }
    }
    if (want_input_grad)
        grads.dx = std::move(dz);
}

void AdamState::init(const DenseNet& net) {
    step = 0;
    const std::size_t n = net.layers.size();
    mw.resize(n);
    vw.resize(n);
    mb.resize(n);
    vb.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        mw[i].assign(net.layers[i].weights.size(), 0.0);
        vw[i].assign(net.layers[i].weights.size(), 0.0);
        mb[i].assign(net.layers[i].biases.size(), 0.0);
        vb[i].assign(net.layers[i].biases.size(), 0.0);
    }
}

void adam_step(AdamState& state, DenseNet& net, const NetGradients& grads) {
    if (state.mw.size() != net.layers.size() ||
        grads.dw.size() != net.layers.size())
        throw DimensionMismatch("adam_step: state/gradient layer count mismatch");
    ++state.step;
    const double inv_bc1 = 1.0 / (1.0 - std::pow(state.beta1, double(state.step)));
    const double inv_bc2 = 1.0 / (1.0 - std::pow(state.beta2, double(state.step)));
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        Layer& l = net.layers[i];
        if (grads.dw[i].size() != l.weights.size() ||
            grads.db[i].size() != l.biases.size())
            throw DimensionMismatch("adam_step: gradient shape mismatch");
        kernels::adam_update(l.weights.data(), grads.dw[i].data(),
                             state.mw[i].data(), state.vw[i].data(),
                             l.weights.size(), state.lr, state.beta1, state.beta2,
                             state.eps, state.l2, inv_bc1, inv_bc2);
        kernels::adam_update(l.biases.data(), grads.db[i].data(),
                             state.mb[i].data(), state.vb[i].data(),
                             l.biases.size(), state.lr, state.beta1, state.beta2,
                             state.eps, 0.0, inv_bc1, inv_bc2);
    }
}

void soft_update(DenseNet& target, const DenseNet& source, double tau) {
    if (target.layers.size() != source.layers.size())
        throw DimensionMismatch("soft_update: layer count mismatch");
    for (std::size_t i = 0; i < target.layers.size(); ++i) {
        Layer& t = target.layers[i];
        const Layer& s = source.layers[i];
        if (t.weights.size() != s.weights.size() ||
            t.biases.size() != s.biases.size())
            throw DimensionMismatch("soft_update: parameter shape mismatch");
        kernels::lerp_toward(t.weights.data(), s.weights.data(),
                             t.weights.size(), tau);
        kernels::lerp_toward(t.biases.data(), s.biases.data(), t.biases.size(),
                             tau);
    }
}

} // namespace quadtune
