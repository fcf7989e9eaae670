#include "ginnacer/network.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

using namespace ginnacer;
using namespace ginnacer::testing;

namespace {

Network two_layer_scalar_net() {
    // relu(2x - 1) followed by identity output
    Network net;
    net.layers.push_back({row_matrix({{2.0}}), vec({-1.0}), true});
    net.layers.push_back({row_matrix({{1.0}}), vec({0.0}), false});
    return net;
}

std::string write_temp(const std::string& content) {
    static int counter = 0;
    std::string path = "network_test_tmp_" + std::to_string(counter++) + ".json";
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("load_network accepts a single linear layer") {
    const std::string path =
        write_temp(R"({"layers":[{"weights":[[1]],"bias":[0],"relu":false}]})");
    const Network net = load_network(path);
    CHECK(net.layer_count() == 1);
    CHECK(net.relu_layer_count() == 0);
    CHECK(net.input_dim() == 1);
    CHECK(net.output_dim() == 1);
    std::remove(path.c_str());
}

TEST_CASE("load_network reports dimension mismatches with the layer index") {
    const std::string path = write_temp(
        R"({"layers":[{"weights":[[1,2],[3,4],[5,6]],"bias":[0,0,0],"relu":true},)"
        R"({"weights":[[1,2,3,4]],"bias":[0],"relu":false}]})");
    CHECK_THROWS_WITH_AS(load_network(path), doctest::Contains("layer 2"), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("load_network rejects non-numeric weights") {
    const std::string path =
        write_temp(R"({"layers":[{"weights":[[oops]],"bias":[0],"relu":false}]})");
    CHECK_THROWS_AS(load_network(path), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("load_network rejects non-finite weights") {
    Network net = two_layer_scalar_net();
    net.layers[0].weights(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_WITH_AS(net.validate(), doctest::Contains("layer 1"), std::runtime_error);
}

TEST_CASE("network JSON round-trips bit-exactly") {
    const Network net = random_network(7, {3, 5, 4, 2});
    const std::string path = write_temp(network_to_json(net));
    const Network back = load_network(path);
    REQUIRE(back.layer_count() == net.layer_count());
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        CHECK(back.layers[i].weights == net.layers[i].weights);
        CHECK(back.layers[i].bias == net.layers[i].bias);
        CHECK(back.layers[i].relu == net.layers[i].relu);
    }
    std::remove(path.c_str());
}

TEST_CASE("forward evaluates the running example") {
    const Network net = two_layer_scalar_net();
    CHECK(forward(net, vec({3.0}))(0) == doctest::Approx(5.0));
    // sigma(-1) = 0
    CHECK(forward(net, vec({0.0}))(0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(forward(net, vec({1.0, 2.0})), std::invalid_argument);
}

TEST_CASE("affine_interval_map matches hand-computed corners") {
    const Matrix W = row_matrix({{2.0, -1.0}});
    const Vector b = vec({-5.0});
    const IntervalVector in{vec({0.0, 0.0}), vec({1.0, 1.0})};
    const IntervalVector out = affine_interval_map(W, b, in);
    CHECK(out.lower(0) == doctest::Approx(-6.0));
    CHECK(out.upper(0) == doctest::Approx(-3.0));
}

TEST_CASE("affine_interval_map is the identity for W=I, b=0") {
    const Matrix W = Matrix::Identity(3, 3);
    const Vector b = Vector::Zero(3);
    const IntervalVector in{vec({-1.0, 0.5, 2.0}), vec({0.0, 1.5, 2.0})};
    const IntervalVector out = affine_interval_map(W, b, in);
    CHECK(out.lower == in.lower);
    CHECK(out.upper == in.upper);
}

TEST_CASE("affine_interval_map is exact on degenerate inputs") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        const Matrix W = random_matrix(rng, 4, 3);
        const Vector b = random_vector(rng, 4, -1.0, 1.0);
        const Vector x = random_vector(rng, 3, -5.0, 5.0);
        const IntervalVector out = affine_interval_map(W, b, IntervalVector::degenerate(x));
        const Vector exact = W * x + b;
        CHECK((out.lower - exact).lpNorm<Eigen::Infinity>() <= 1e-12);
        CHECK((out.upper - exact).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
}

TEST_CASE("affine_interval_map equals the corner-enumeration oracle") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 100; ++rep) {
        const Matrix W = random_matrix(rng, 3, 3);
        const Vector b = random_vector(rng, 3, -2.0, 2.0);
        const Vector lo = random_vector(rng, 3, -3.0, 0.0);
        const IntervalVector in{lo, lo + random_vector(rng, 3, 0.0, 4.0)};
        const IntervalVector expected = corner_hull(W, b, in);
        const IntervalVector got = affine_interval_map(W, b, in);
        CHECK((got.lower - expected.lower).lpNorm<Eigen::Infinity>() <= 1e-12);
        CHECK((got.upper - expected.upper).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
}

TEST_CASE("interval_forward is exact on degenerate inputs") {
    const Network net = random_network(21, {2, 6, 3});
    std::mt19937_64 rng(22);
    for (int rep = 0; rep < 50; ++rep) {
        const Vector x = random_vector(rng, 2, -4.0, 4.0);
        const IntervalVector out = interval_forward(net, IntervalVector::degenerate(x));
        const Vector exact = forward(net, x);
        CHECK((out.lower - exact).lpNorm<Eigen::Infinity>() <= 1e-9);
        CHECK((out.upper - exact).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
}

TEST_CASE("interval_forward maps [-2,3] through a single ReLU to [0,3]") {
    Network net;
    net.layers.push_back({row_matrix({{1.0}}), vec({0.0}), true});
    const IntervalVector out = interval_forward(net, {vec({-2.0}), vec({3.0})});
    CHECK(out.lower(0) == doctest::Approx(0.0));
    CHECK(out.upper(0) == doctest::Approx(3.0));
}

TEST_CASE("interval_forward contains sampled forward values") {
    const Network net = random_network(31, {3, 8, 8, 2});
    const IntervalVector in{vec({-1.0, 0.0, -2.0}), vec({1.5, 2.0, 0.5})};
    const IntervalVector out = interval_forward(net, in);
    std::mt19937_64 rng(32);
    for (int rep = 0; rep < 1000; ++rep) {
        Vector x(3);
        for (Index i = 0; i < 3; ++i)
            x(i) = std::uniform_real_distribution<double>(in.lower(i), in.upper(i))(rng);
        CHECK(out.contains(forward(net, x), 1e-9));
    }
}

TEST_CASE("interval_forward is inclusion isotone") {
    const Network net = random_network(41, {2, 6, 6, 2});
    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 200; ++rep) {
        const Vector c = random_vector(rng, 2, -2.0, 2.0);
        const double r_in = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const double r_out = r_in + std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const IntervalVector inner{(c.array() - r_in).matrix(), (c.array() + r_in).matrix()};
        const IntervalVector outer{(c.array() - r_out).matrix(), (c.array() + r_out).matrix()};
        const IntervalVector oi = interval_forward(net, inner);
        const IntervalVector oo = interval_forward(net, outer);
        CHECK(oo.contains(oi));
    }
}
