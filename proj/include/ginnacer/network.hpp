#pragma once

#include "ginnacer/linalg.hpp"

#include <string>
#include <vector>

namespace ginnacer {

// One affine layer. Layers with `relu` apply the activation elementwise
// after the affine map; the final layer of a network is affine only.
struct Layer {
    Matrix weights; // rows: outputs, cols: inputs
    Vector bias;
    bool relu = true;

    Index input_dim() const { return weights.cols(); }
    Index output_dim() const { return weights.rows(); }
};

// Feedforward ReLU network: a chain of ReLU layers followed by one linear
// output layer. Immutable by convention once loaded or built.
struct Network {
    std::vector<Layer> layers;

    Index input_dim() const { return layers.front().weights.cols(); }
    Index output_dim() const { return layers.back().weights.rows(); }
    std::size_t layer_count() const { return layers.size(); }
    std::size_t relu_layer_count() const;

    // Throws std::runtime_error naming the offending layer (1-based) on
    // dimension mismatches, non-finite parameters, or a bad relu mask.
    void validate() const;
};

// Elementwise interval [lower, upper]. Degenerate intervals (lower == upper)
// represent exact values.
struct IntervalVector {
    Vector lower;
    Vector upper;

    Index size() const { return lower.size(); }
    Vector width() const { return upper - lower; }

    static IntervalVector degenerate(const Vector& x) { return {x, x}; }

    bool contains(const Vector& x, double slack = 0.0) const;
    bool contains(const IntervalVector& inner, double slack = 0.0) const;

    // Throws std::runtime_error if lower > upper anywhere or sizes differ.
    void validate() const;
};

Network load_network(const std::string& path);
void save_network(const Network& net, const std::string& path);

// JSON text forms of the above; save emits numbers with 17 significant
// digits so weights round-trip bit-exactly.
Network network_from_json(const std::string& text);
std::string network_to_json(const Network& net);

// Exact evaluation of the network at a point.
Vector forward(const Network& net, const Vector& x);

// Interval image of an affine map: splits W into its positive and negative
// parts so that out.upper = W+ in.upper + W- in.lower + b and symmetrically
// for the lower bound.
IntervalVector affine_interval_map(const Matrix& W, const Vector& b, const IntervalVector& in);

// Naive interval bound propagation through the whole network; a sound
// enclosure of {forward(net, x) : x in `in`}.
IntervalVector interval_forward(const Network& net, const IntervalVector& in);

} // namespace ginnacer
