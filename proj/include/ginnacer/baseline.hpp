#pragma once

#include "ginnacer/abstraction.hpp"
#include "ginnacer/network.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ginnacer {

// One ReLU layer of the merge baseline. Each group carries a two-sided
// bound: elementwise max of the member weight rows and biases for the upper
// ReLU, elementwise min for the lower one. Group outputs are broadcast back
// to every member, so layer dimensions are preserved.
struct BaselineLayer {
    std::vector<std::vector<int>> groups;
    std::vector<int> group_index;
    Matrix w_max, w_min; // group_count x n_in
    Vector b_max, b_min;
    Matrix w_max_pos, w_max_neg, w_min_pos, w_min_neg;

    Index neuron_count() const { return static_cast<Index>(group_index.size()); }
    Index group_count() const { return w_max.rows(); }

    void finalize_splits();
};

// Centroid-agnostic global abstraction built by randomly pairing neurons
// until each layer reaches its target group count. Sound on nonnegative
// layer inputs, which the pre-layer guarantees.
struct MergeBaseline {
    std::optional<Layer> pre_layer;
    std::vector<BaselineLayer> layers;
    Layer output_layer;
    std::vector<ReluLayerCount> relu_counts; // (neurons, groups) per ReLU layer

    Index input_dim() const {
        return pre_layer ? pre_layer->input_dim()
                         : (layers.empty() ? output_layer.input_dim() : layers.front().w_max.cols());
    }

    void validate() const;
};

struct BaselineOptions {
    bool apply_pre_layer = true;
};

// Deterministic for a fixed seed. `target_counts` holds one entry per ReLU
// layer; a target of n or more leaves the layer unmerged.
MergeBaseline build_merge_baseline(const Network& net, const std::vector<Index>& target_counts,
                                   std::uint64_t seed, const BaselineOptions& opts = {});

IntervalVector eval_merge_baseline(const MergeBaseline& bl, const Vector& x);

MergeBaseline load_baseline(const std::string& path);
void save_baseline(const MergeBaseline& bl, const std::string& path);
MergeBaseline baseline_from_json(const std::string& text);
std::string baseline_to_json(const MergeBaseline& bl);

} // namespace ginnacer
