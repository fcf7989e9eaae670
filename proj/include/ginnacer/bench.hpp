#pragma once

#include "ginnacer/abstraction.hpp"
#include "ginnacer/baseline.hpp"
#include "ginnacer/network.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace ginnacer {

struct BenchConfig {
    Vector centroid;
    std::vector<double> deltas;    // strictly increasing, all > 0
    int samples_per_delta = 10000;
    std::uint64_t seed = 0;
    std::vector<std::string> variants = {"ginnacer", "baseline", "ibp"};
    std::vector<std::size_t> skip_values = {0};
    NegInput neg_input = NegInput::On;
    bool timing = true; // timing columns are the only nondeterministic ones

    void validate() const;
};

// Points with ||x - c||_inf == delta: draw uniformly inside the cube, then
// project one uniformly chosen coordinate to c_i - delta or c_i + delta.
std::vector<Vector> sample_hypercube_surface(const Vector& center, double delta, int count,
                                             std::uint64_t seed);

using PointEvaluator = std::function<IntervalVector(const Vector&)>;

// Worst-case over-approximation margin: max over points of the infinity
// norm of the output interval width.
double max_margin(const PointEvaluator& evaluate, const std::vector<Vector>& points);

// The 201 samples of the rational polynomial used as a 1-D regression
// dataset: x in [-10, 10] with step 0.1.
std::vector<std::pair<double, double>> sample_polynomial();
std::string polynomial_csv();

struct BenchRow {
    std::string variant;
    std::size_t skip_layers = 0;
    double delta = 0.0;
    double max_margin = 0.0;
    Index groups_total = 0;
    Index relus_total = 0;
    double build_ms = 0.0;
    double eval_us_median = 0.0;
};

// One row per (variant, skip setting, delta). The same surface samples are
// used for every variant at a given delta; the "ibp" variant propagates the
// whole box [c - delta, c + delta] instead of sampling.
std::vector<BenchRow> run_benchmark(const Network& net, const BenchConfig& config);

std::string benchmark_csv(const std::vector<BenchRow>& rows);

} // namespace ginnacer
