#include <doctest.h>

#include "quadtune/kernels.hpp"
#include "quadtune/neural.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace quadtune;

namespace {

// pin the scalar backend for bit-exactness tests, restore on scope exit
struct ScalarGuard {
    kernels::Backend saved = kernels::active_backend();
    ScalarGuard() { kernels::set_backend(kernels::Backend::scalar); }
    ~ScalarGuard() { kernels::set_backend(saved); }
};

double loss_of(const DenseNet& net, const std::vector<double>& x, int batch,
               const std::vector<double>& c) {
    BatchCache cache;
    forward_batch(net, x.data(), batch, cache);
    const double* y = cache.output();
    double l = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) l += c[i] * y[i];
    return l;
}

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1.0});
}

} // namespace

TEST_CASE("activation names round-trip") {
    for (Activation a :
         {Activation::tanh, Activation::linear, Activation::clipped_relu})
        CHECK(activation_from_name(activation_name(a)) == a);
    CHECK_THROWS_AS(activation_from_name("softmax"), UnsupportedActivation);
}

TEST_CASE("make_mlp shapes, bounds and determinism") {
    std::mt19937_64 rng(3);
    const DenseNet net = make_mlp(
        {12, 128, 128, 5},
        {Activation::tanh, Activation::tanh, Activation::clipped_relu}, rng);
    CHECK(net.layers.size() == 3);
    CHECK(net.input_dim() == 12);
    CHECK(net.output_dim() == 5);
    CHECK(net.param_count() == 12 * 128 + 128 + 128 * 128 + 128 + 128 * 5 + 5);
    CHECK_NOTHROW(net.validate());

    for (const Layer& l : net.layers) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(l.in_dim));
        double biggest = 0.0;
        for (double w : l.weights) {
            CHECK(std::abs(w) <= bound);
            biggest = std::max(biggest, std::abs(w));
        }
        CHECK(biggest > 0.5 * bound); // actually spread over the range
        for (double b : l.biases) CHECK(b == 0.0);
    }

    // same seed, same net
    std::mt19937_64 rng2(3);
    const DenseNet again = make_mlp(
        {12, 128, 128, 5},
        {Activation::tanh, Activation::tanh, Activation::clipped_relu}, rng2);
    CHECK(again.layers[1].weights == net.layers[1].weights);
}

TEST_CASE("validate rejects inconsistent shapes") {
    std::mt19937_64 rng(4);
    DenseNet net = make_mlp({3, 4, 2}, {Activation::tanh, Activation::linear}, rng);
    net.layers[1].in_dim = 5; // breaks the chain
    CHECK_THROWS_AS(net.validate(), DimensionMismatch);

    DenseNet net2 = make_mlp({3, 4, 2}, {Activation::tanh, Activation::linear}, rng);
    net2.layers[0].weights.pop_back();
    CHECK_THROWS_AS(net2.validate(), DimensionMismatch);
}

TEST_CASE("single-sample forward, worked by hand") {
    DenseNet net;
    Layer l;
    l.in_dim = 2;
    l.out_dim = 1;
    l.weights = {0.5, -0.25};
    l.biases = {0.1};
    l.activation = Activation::linear;
    net.layers.push_back(l);

    const std::vector<double> x{2.0, 4.0};
    CHECK(forward(net, x)[0] == doctest::Approx(0.1).epsilon(1e-15));

    net.layers[0].activation = Activation::tanh;
    CHECK(forward(net, x)[0] == doctest::Approx(std::tanh(0.1)).epsilon(1e-15));

    // clipped identity inside the band, hard clamp outside
    net.layers[0].activation = Activation::clipped_relu;
    CHECK(forward(net, x)[0] == doctest::Approx(0.1).epsilon(1e-15));
    net.layers[0].biases = {2.0}; // pre = 2.5
    CHECK(forward(net, x)[0] == 1.0);
    net.layers[0].biases = {-3.0}; // pre = -2.5
    CHECK(forward(net, x)[0] == -1.0);

    const std::vector<double> wrong{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(forward(net, wrong), DimensionMismatch);
}

TEST_CASE("batched forward equals single-sample forward exactly on scalar") {
    ScalarGuard guard;
    std::mt19937_64 rng(5);
    const DenseNet net =
        make_mlp({6, 16, 3}, {Activation::tanh, Activation::clipped_relu}, rng);

    const int batch = 8;
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    std::vector<double> x(batch * 6);
    for (double& v : x) v = u(rng);

    BatchCache cache;
    forward_batch(net, x.data(), batch, cache);
    for (int b = 0; b < batch; ++b) {
        const std::vector<double> single =
            forward(net, std::span<const double>(x.data() + b * 6, 6));
        for (int o = 0; o < 3; ++o)
            CHECK(cache.output()[b * 3 + o] == single[o]); // bit-identical
    }
}

TEST_CASE("backward_batch gradients agree with finite differences") {
    ScalarGuard guard;
    std::mt19937_64 rng(6);
    DenseNet net =
        make_mlp({3, 5, 2}, {Activation::tanh, Activation::linear}, rng);

    const int batch = 4;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(batch * 3), c(batch * 2);
    for (double& v : x) v = u(rng);
    for (double& v : c) v = u(rng);

    BatchCache cache;
    forward_batch(net, x.data(), batch, cache);
    NetGradients grads;
    backward_batch(net, x.data(), batch, cache, c.data(), grads, true, true);

    const double h = 1e-6;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        Layer& l = net.layers[li];
        for (std::size_t wi = 0; wi < l.weights.size(); ++wi) {
            const double keep = l.weights[wi];
            l.weights[wi] = keep + h;
            const double lp = loss_of(net, x, batch, c);
            l.weights[wi] = keep - h;
            const double lm = loss_of(net, x, batch, c);
            l.weights[wi] = keep;
            CHECK(close_rel(grads.dw[li][wi], (lp - lm) / (2 * h), 1e-6));
        }
        for (std::size_t bi = 0; bi < l.biases.size(); ++bi) {
            const double keep = l.biases[bi];
            l.biases[bi] = keep + h;
            const double lp = loss_of(net, x, batch, c);
            l.biases[bi] = keep - h;
            const double lm = loss_of(net, x, batch, c);
            l.biases[bi] = keep;
            CHECK(close_rel(grads.db[li][bi], (lp - lm) / (2 * h), 1e-6));
        }
    }
    for (std::size_t xi = 0; xi < x.size(); ++xi) {
        const double keep = x[xi];
        x[xi] = keep + h;
        const double lp = loss_of(net, x, batch, c);
        x[xi] = keep - h;
        const double lm = loss_of(net, x, batch, c);
        x[xi] = keep;
        CHECK(close_rel(grads.dx[xi], (lp - lm) / (2 * h), 1e-6));
    }
}

TEST_CASE("finite differences through a clipped output head") {
    ScalarGuard guard;
    std::mt19937_64 rng(7);

    // redraw until every final pre-activation is well away from the clip
    // boundary, so the finite difference never straddles the kink
    DenseNet net;
    std::vector<double> x;
    const int batch = 4;
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::mt19937_64 netrng(100 + attempt);
        net = make_mlp({3, 6, 2},
                       {Activation::tanh, Activation::clipped_relu}, netrng);
        std::uniform_real_distribution<double> u(-1.2, 1.2);
        x.assign(batch * 3, 0.0);
        for (double& v : x) v = u(rng);
        BatchCache probe;
        forward_batch(net, x.data(), batch, probe);
        bool ok = true;
        for (double z : probe.pre.back())
            if (std::abs(std::abs(z) - 1.0) < 1e-3) ok = false;
        if (ok) break;
        REQUIRE(attempt < 199);
    }

    std::vector<double> c(batch * 2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& v : c) v = u(rng);

    BatchCache cache;
    forward_batch(net, x.data(), batch, cache);
    NetGradients grads;
    backward_batch(net, x.data(), batch, cache, c.data(), grads, true, false);

    const double h = 1e-6;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        Layer& l = net.layers[li];
        for (std::size_t wi = 0; wi < l.weights.size(); ++wi) {
            const double keep = l.weights[wi];
            l.weights[wi] = keep + h;
            const double lp = loss_of(net, x, batch, c);
            l.weights[wi] = keep - h;
            const double lm = loss_of(net, x, batch, c);
            l.weights[wi] = keep;
            CHECK(close_rel(grads.dw[li][wi], (lp - lm) / (2 * h), 1e-6));
        }
    }
}

TEST_CASE("saturated clipped units pass no gradient") {
    ScalarGuard guard;
    DenseNet net;
    Layer l;
    l.in_dim = 1;
    l.out_dim = 1;
    l.weights = {3.0};
    l.biases = {0.0};
    l.activation = Activation::clipped_relu;
    net.layers.push_back(l);

    const double x = 1.0; // pre = 3, clamped to 1
    BatchCache cache;
    forward_batch(net, &x, 1, cache);
    CHECK(cache.output()[0] == 1.0);

    const double dy = 1.0;
    NetGradients grads;
    backward_batch(net, &x, 1, cache, &dy, grads, true, true);
    CHECK(grads.dw[0][0] == 0.0);
    CHECK(grads.db[0][0] == 0.0);
    CHECK(grads.dx[0] == 0.0);
}

TEST_CASE("adam_step applies L2 to weights only, worked by hand") {
    DenseNet net;
    Layer l;
    l.in_dim = 1;
    l.out_dim = 1;
    l.weights = {0.5};
    l.biases = {0.2};
    l.activation = Activation::linear;
    net.layers.push_back(l);

    AdamState adam;
    adam.lr = 0.1;
    adam.l2 = 0.01;
    adam.init(net);

    NetGradients grads;
    grads.dw = {{0.2}};
    grads.db = {{-0.1}};
    adam_step(adam, net, grads);

    // weight: g = 0.2 + 0.01*0.5 = 0.205; after bias correction
    // mhat/sqrt(vhat) = 1, so w -= 0.1 * 0.205/(0.205 + 1e-8)
    CHECK(net.layers[0].weights[0] ==
          doctest::Approx(0.40000000487804878).epsilon(1e-12));
    // bias: no L2, g = -0.1; b += 0.1 * 0.1/(0.1 + 1e-8)
    CHECK(net.layers[0].biases[0] ==
          doctest::Approx(0.29999999000000098).epsilon(1e-12));
    CHECK(adam.step == 1);
}

TEST_CASE("soft_update nudges the target toward the source") {
    std::mt19937_64 rng(8);
    DenseNet target = make_mlp({2, 3}, {Activation::linear}, rng);
    DenseNet source = make_mlp({2, 3}, {Activation::linear}, rng);
    const DenseNet before = target;

    soft_update(target, source, 0.1);
    for (std::size_t i = 0; i < target.layers[0].weights.size(); ++i) {
        const double want = before.layers[0].weights[i] +
                            0.1 * (source.layers[0].weights[i] -
                                   before.layers[0].weights[i]);
        CHECK(target.layers[0].weights[i] == doctest::Approx(want).epsilon(1e-15));
    }

    // tau = 1 copies the source outright
    soft_update(target, source, 1.0);
    CHECK(target.layers[0].weights == source.layers[0].weights);

    DenseNet small = make_mlp({2, 2}, {Activation::linear}, rng);
    CHECK_THROWS_AS(soft_update(target, small, 0.1), DimensionMismatch);
}
