#include "ginnacer/bench.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace ginnacer;
using namespace ginnacer::testing;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ','))
            fields.push_back(field);
        rows.push_back(std::move(fields));
    }
    return rows;
}

} // namespace

TEST_CASE("surface samples sit exactly on the hypercube surface") {
    const Vector c = vec({1.0, -2.0, 0.5});
    for (double delta : {0.01, 0.1, 1.0, 10.0}) {
        const auto points = sample_hypercube_surface(c, delta, 500, 7);
        REQUIRE(points.size() == 500);
        for (const Vector& x : points) {
            const double dist = (x - c).lpNorm<Eigen::Infinity>();
            CHECK(std::abs(dist - delta) <= 1e-12);
        }
    }
}

TEST_CASE("one-dimensional surface samples are the two endpoints") {
    const auto points = sample_hypercube_surface(vec({0.0}), 2.0, 50, 3);
    for (const Vector& x : points)
        CHECK(std::abs(x(0)) == doctest::Approx(2.0));
}

TEST_CASE("sample_hypercube_surface rejects nonpositive delta") {
    CHECK_THROWS_AS(sample_hypercube_surface(vec({0.0}), 0.0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_hypercube_surface(vec({0.0}), -1.0, 1, 1), std::invalid_argument);
}

TEST_CASE("non-projected coordinates are uniform on the slab") {
    // Kolmogorov-Smirnov distance of the non-projected coordinate values
    // against U(-1, 1); 1.63/sqrt(N) is the 1% critical value.
    const Vector c = vec({0.0, 0.0});
    const double delta = 1.0;
    const auto points = sample_hypercube_surface(c, delta, 100000, 17);
    std::vector<double> values;
    for (const Vector& x : points)
        for (Index i = 0; i < 2; ++i)
            if (std::abs(std::abs(x(i)) - delta) > 1e-15)
                values.push_back(x(i));
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double cdf = (values[i] + delta) / (2.0 * delta);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        ks = std::max({ks, std::abs(cdf - lo), std::abs(cdf - hi)});
    }
    CHECK(ks < 1.63 / std::sqrt(n));
}

TEST_CASE("identical seeds reproduce identical samples") {
    const Vector c = vec({0.5, 1.5});
    const auto a = sample_hypercube_surface(c, 0.3, 100, 99);
    const auto b = sample_hypercube_surface(c, 0.3, 100, 99);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i] == b[i]);
}

TEST_CASE("max_margin of an exact evaluator is zero") {
    const Network net = random_network(901, {2, 8, 2});
    BuildOptions opts;
    opts.skip_layers = net.relu_layer_count();
    const GinnacerAbstraction g = build_ginnacer(net, vec({0.5, 0.5}), opts);
    const auto points = sample_hypercube_surface(vec({0.5, 0.5}), 1.0, 200, 5);
    const double margin =
        max_margin([&](const Vector& x) { return eval_ginnacer(g, x); }, points);
    CHECK(margin <= 1e-9);
}

TEST_CASE("max_margin at the centroid alone is zero") {
    const Network net = random_network(902, {2, 12, 2});
    const Vector xc = vec({0.2, -0.4});
    const GinnacerAbstraction g = build_ginnacer(net, xc, {});
    const double margin =
        max_margin([&](const Vector& x) { return eval_ginnacer(g, x); }, {xc});
    CHECK(margin <= 1e-9);
}

TEST_CASE("max_margin requires points") {
    CHECK_THROWS_AS(max_margin([](const Vector&) { return IntervalVector{}; }, {}),
                    std::invalid_argument);
}

TEST_CASE("polynomial samples match the hand-computed values") {
    const auto samples = sample_polynomial();
    REQUIRE(samples.size() == 201);
    CHECK(samples.front().first == doctest::Approx(-10.0));
    CHECK(samples.back().first == doctest::Approx(10.0));
    CHECK(samples[100].first == 0.0);
    CHECK(samples[100].second == 0.0);
    CHECK(samples[110].first == 1.0);
    CHECK(std::abs(samples[110].second - 0.845 / 1.471) <= 1e-12);
}

TEST_CASE("benchmark CSV round-trips through a parser") {
    const Network net = random_network(911, {1, 8, 8, 1});
    BenchConfig cfg;
    cfg.centroid = vec({1.0});
    cfg.deltas = {0.1, 1.0};
    cfg.samples_per_delta = 50;
    cfg.seed = 4;
    cfg.timing = false;
    const auto rows = run_benchmark(net, cfg);
    const std::string csv = benchmark_csv(rows);
    const auto parsed = parse_csv(csv);
    REQUIRE(parsed.size() == rows.size() + 1);
    REQUIRE(parsed[0].size() == 8);
    CHECK(parsed[0][0] == "variant");
    for (std::size_t i = 1; i < parsed.size(); ++i) {
        REQUIRE(parsed[i].size() == 8);
        CHECK(std::stod(parsed[i][3]) >= 0.0);
    }
}

TEST_CASE("benchmark output is reproducible with timing disabled") {
    const Network net = random_network(912, {1, 10, 10, 1});
    BenchConfig cfg;
    cfg.centroid = vec({2.0});
    cfg.deltas = {0.01, 0.1, 1.0};
    cfg.samples_per_delta = 100;
    cfg.seed = 11;
    cfg.skip_values = {0, 1};
    cfg.timing = false;
    const std::string a = benchmark_csv(run_benchmark(net, cfg));
    const std::string b = benchmark_csv(run_benchmark(net, cfg));
    CHECK(a == b);
    CHECK_FALSE(a.empty());
}

TEST_CASE("skip-all rows report zero margin") {
    const Network net = random_network(913, {1, 6, 6, 1});
    BenchConfig cfg;
    cfg.centroid = vec({0.5});
    cfg.deltas = {0.1, 1.0};
    cfg.samples_per_delta = 100;
    cfg.variants = {"ginnacer"};
    cfg.skip_values = {2};
    cfg.timing = false;
    for (const BenchRow& row : run_benchmark(net, cfg))
        CHECK(row.max_margin <= 1e-9);
}

TEST_CASE("box-interval widths are nondecreasing in delta") {
    const Network net = random_network(914, {2, 10, 10, 2});
    const Vector xc = vec({0.5, -1.0});
    const GinnacerAbstraction g = build_ginnacer(net, xc, {});
    double prev = -1.0;
    for (double delta : {0.01, 0.1, 0.5, 1.0, 5.0}) {
        const IntervalVector box{(xc.array() - delta).matrix(), (xc.array() + delta).matrix()};
        const double width = eval_ginnacer_interval(g, box).width().maxCoeff();
        CHECK(width >= prev);
        prev = width;
    }
}

TEST_CASE("config validation rejects bad deltas and samples") {
    BenchConfig cfg;
    cfg.centroid = vec({0.0});
    cfg.deltas = {};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.deltas = {0.1, 0.1};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.deltas = {0.1, 1.0};
    cfg.samples_per_delta = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.samples_per_delta = 10;
    cfg.variants = {"nope"};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
