#pragma once

#include "ginnacer/network.hpp"
#include "ginnacer/partition.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ginnacer {

// Whether to prepend the lossless (relu(x), relu(-x)) pre-layer so the first
// abstracted layer sees nonnegative inputs. Auto applies it unless the
// caller supplies a nonnegative input-domain lower bound.
enum class NegInput { On, Off, Auto };

// Abstraction parameters of one ReLU layer. The reconstruction matrix is
// kept as a group index per neuron; broadcasting a group's shared ReLU back
// to its members is a gather. Sign splits are fixed at build time since
// every evaluation needs them.
struct LayerAbstraction {
    std::vector<std::vector<int>> groups;
    std::vector<int> group_index; // neuron -> group
    Matrix V;                     // group_count x n_in: merged upper weights
    Vector u;                     // group_count: merged upper biases
    Matrix AW;                    // n x n_in: rows zeroed where inactive at the centroid
    Vector Ab;                    // n: entries zeroed where inactive
    Matrix V_pos, V_neg, AW_pos, AW_neg;

    Index neuron_count() const { return AW.rows(); }
    Index group_count() const { return V.rows(); }
    Index input_dim() const { return AW.cols(); }

    void finalize_splits();
};

struct ReluLayerCount {
    Index original;
    Index abstracted;
};

// Full abstraction: optional pre-layer, leading ReLU layers kept exact,
// abstracted ReLU layers, and the final linear layer. Output intervals
// collapse to the exact network output at `centroid` and stay sound for
// every input.
struct GinnacerAbstraction {
    std::optional<Layer> pre_layer;
    std::vector<Layer> prefix_layers;
    std::vector<LayerAbstraction> layers;
    Layer output_layer;
    Vector centroid;                        // original network input
    std::vector<ReluLayerCount> relu_counts; // one entry per ReLU layer

    Index input_dim() const { return centroid.size(); }
    std::size_t exact_prefix() const { return prefix_layers.size(); }

    void validate() const;
};

struct BuildOptions {
    NegInput neg_input = NegInput::Auto;
    std::size_t skip_layers = 0;           // leading ReLU layers kept exact
    std::optional<Vector> domain_lower;    // lower bound of the input domain, if known
    std::function<void(const std::string&)> warn; // defaults to stderr
};

GinnacerAbstraction build_ginnacer(const Network& net, const Vector& centroid,
                                   const BuildOptions& opts = {});

// Executes the abstraction on a concrete input (degenerate interval) or on
// an input box. Point evaluation is exactly interval evaluation of [x, x].
IntervalVector eval_ginnacer(const GinnacerAbstraction& g, const Vector& x);
IntervalVector eval_ginnacer_interval(const GinnacerAbstraction& g, const IntervalVector& in);

struct LayerReluStats {
    Index original;
    Index abstracted;
    double percent_remaining;
};

struct ReluStats {
    std::vector<LayerReluStats> layers;
    Index pre_layer_relus = 0; // extra nonlinearities added by the pre-layer
    Index total_original = 0;
    Index total_abstracted = 0;
};

ReluStats relu_stats(const GinnacerAbstraction& g);

GinnacerAbstraction load_abstraction(const std::string& path);
void save_abstraction(const GinnacerAbstraction& g, const std::string& path);
GinnacerAbstraction abstraction_from_json(const std::string& text);
std::string abstraction_to_json(const GinnacerAbstraction& g);

} // namespace ginnacer
