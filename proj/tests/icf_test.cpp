#include "ginnacer/icf.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <random>

using namespace ginnacer;
using namespace ginnacer::testing;

TEST_CASE("centroid_activation splits active and inactive neurons") {
    const auto act = centroid_activation(row_matrix({{1.0}, {-1.0}}), vec({0.0, 0.0}), vec({1.0}));
    CHECK(act.active_mask == std::vector<bool>{true, false});
    CHECK(act.sign(0) == -1.0);
    CHECK(act.sign(1) == 1.0);
}

TEST_CASE("centroid_activation treats a zero pre-activation as active") {
    // W xc + b = 0 exactly
    const auto act = centroid_activation(row_matrix({{2.0}}), vec({-2.0}), vec({1.0}));
    CHECK(act.active_mask[0]);
    CHECK(act.sign(0) == -1.0);
}

TEST_CASE("centroid_activation with all-negative pre-activations") {
    const auto act =
        centroid_activation(row_matrix({{1.0}, {2.0}}), vec({-10.0, -10.0}), vec({1.0}));
    CHECK(act.active_mask == std::vector<bool>{false, false});
    CHECK(act.sign(0) == 1.0);
    CHECK(act.sign(1) == 1.0);
}

TEST_CASE("icf_eval reproduces the hand example") {
    const Matrix W = row_matrix({{2.0}});
    const Vector b = vec({-1.0});
    const auto act = centroid_activation(W, b, vec({1.0}));
    REQUIRE(act.active_mask[0]); // pre-activation 1 >= 0
    // r = -(2*3 - 1) = -5, t = 5, output sigma(-5) + 5 = 5
    CHECK(icf_eval(W, b, act, vec({3.0}))(0) == doctest::Approx(5.0));
    // at the centroid itself: r = -1 <= 0, output 1
    CHECK(icf_eval(W, b, act, vec({1.0}))(0) == doctest::Approx(1.0));
}

TEST_CASE("icf_eval leaves inactive neurons unchanged") {
    const Matrix W = row_matrix({{1.0}});
    const Vector b = vec({-3.0});
    const auto act = centroid_activation(W, b, vec({1.0}));
    REQUIRE_FALSE(act.active_mask[0]);
    CHECK(icf_eval(W, b, act, vec({5.0}))(0) == doctest::Approx(2.0));
    CHECK(icf_eval(W, b, act, vec({0.0}))(0) == doctest::Approx(0.0));
}

TEST_CASE("icf_eval equals relu(Wx+b) on random layers") {
    std::mt19937_64 rng(101);
    for (int layer = 0; layer < 100; ++layer) {
        const Index n_out = 1 + static_cast<Index>(rng() % 16);
        const Index n_in = 1 + static_cast<Index>(rng() % 16);
        const Matrix W = random_matrix(rng, n_out, n_in);
        const Vector b = random_vector(rng, n_out, -1.0, 1.0);
        const Vector xc = random_vector(rng, n_in, -2.0, 2.0);
        const auto act = centroid_activation(W, b, xc);
        for (int rep = 0; rep < 100; ++rep) {
            const Vector x = random_vector(rng, n_in, -5.0, 5.0);
            const Vector expected = relu(W * x + b);
            const Vector got = icf_eval(W, b, act, x);
            CHECK((got - expected).lpNorm<Eigen::Infinity>() <= 1e-9);
        }
    }
}

TEST_CASE("icf internal potential is nonpositive at the centroid") {
    std::mt19937_64 rng(103);
    for (int layer = 0; layer < 100; ++layer) {
        const Matrix W = random_matrix(rng, 8, 5);
        const Vector b = random_vector(rng, 8, -1.0, 1.0);
        const Vector xc = random_vector(rng, 5, -2.0, 2.0);
        const auto act = centroid_activation(W, b, xc);
        const Vector r = act.sign.cwiseProduct(W * xc + b);
        CHECK(r.maxCoeff() <= 1e-12);
    }
}

TEST_CASE("compute_centroid_context propagates centroids") {
    const Network net = random_network(104, {3, 6, 5, 2});
    const Vector c = vec({0.5, -1.0, 2.0});
    const CentroidContext ctx = compute_centroid_context(net, c);
    REQUIRE(ctx.layers.size() == 2);
    CHECK(ctx.layers[0].centroid_in == c);
    const Vector c1 = relu(net.layers[0].weights * c + net.layers[0].bias);
    CHECK((ctx.layers[0].centroid_out - c1).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((ctx.layers[1].centroid_in - c1).lpNorm<Eigen::Infinity>() <= 1e-12);
    for (const CentroidLayer& l : ctx.layers)
        for (std::size_t i = 0; i < l.activation.active_mask.size(); ++i)
            CHECK(l.activation.sign(static_cast<Index>(i)) ==
                  (l.activation.active_mask[i] ? -1.0 : 1.0));
}

TEST_CASE("build_pre_layers reproduces the hand example") {
    Network net;
    net.layers.push_back({row_matrix({{3.0}}), vec({0.0}), true});
    net.layers.push_back({row_matrix({{1.0}}), vec({0.0}), false});
    const Network pre = build_pre_layers(net);
    REQUIRE(pre.layer_count() == 3);
    // pre-layer output at x = -2 is (relu(-2), relu(2)) = (0, 2)
    const Vector split = relu(pre.layers[0].weights * vec({-2.0}) + pre.layers[0].bias);
    CHECK(split(0) == doctest::Approx(0.0));
    CHECK(split(1) == doctest::Approx(2.0));
    // modified first layer computes 3*0 - 3*2 = -6 = 3*(-2)
    const Vector y1 = pre.layers[1].weights * split + pre.layers[1].bias;
    CHECK(y1(0) == doctest::Approx(-6.0));
}

TEST_CASE("build_pre_layers preserves forward exactly") {
    std::mt19937_64 rng(111);
    for (int rep = 0; rep < 5; ++rep) {
        const Network net = random_network(200 + rep, {4, 10, 8, 3});
        const Network pre = build_pre_layers(net);
        for (int s = 0; s < 200; ++s) {
            const Vector x = random_vector(rng, 4, -10.0, 10.0);
            const Vector a = forward(net, x);
            const Vector b = forward(pre, x);
            CHECK((a - b).lpNorm<Eigen::Infinity>() <= 1e-9);
        }
    }
}

TEST_CASE("build_pre_layers maps zero input to zero pre-activations") {
    const Network net = random_network(115, {3, 5, 2});
    const Network pre = build_pre_layers(net);
    const Vector split = relu(pre.layers[0].weights * Vector::Zero(3) + pre.layers[0].bias);
    CHECK(split.lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((forward(pre, Vector::Zero(3)) - forward(net, Vector::Zero(3)))
              .lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("pre-layer outputs are nonnegative for any input") {
    const Network net = random_network(116, {4, 6, 2});
    const Network pre = build_pre_layers(net);
    std::mt19937_64 rng(117);
    for (int rep = 0; rep < 200; ++rep) {
        const Vector x = random_vector(rng, 4, -10.0, 10.0);
        const Vector split = relu(pre.layers[0].weights * x + pre.layers[0].bias);
        CHECK(split.minCoeff() >= 0.0);
    }
}

TEST_CASE("build_pre_layers requires a ReLU layer") {
    Network net;
    net.layers.push_back({row_matrix({{1.0}}), vec({0.0}), false});
    CHECK_THROWS_AS(build_pre_layers(net), std::invalid_argument);
}
