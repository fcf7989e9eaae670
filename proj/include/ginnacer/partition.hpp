#pragma once

#include "ginnacer/linalg.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace ginnacer {

// Disjoint neuron groups covering [0, n) together with the merged
// upper-bound parameters of each group. Groups are reported in order of
// their smallest member, members sorted ascending.
struct Partition {
    std::vector<std::vector<int>> groups;
    Matrix merged_weights; // one row per group: elementwise max over members
    Vector merged_biases;  // max over members
    std::size_t candidate_merges = 0;

    std::size_t group_count() const { return groups.size(); }
};

// Elementwise column max over the rows of SW indexed by `group`, and max of
// the corresponding Sb entries.
std::pair<Vector, double> merged_upper_params(const Matrix& SW, const Vector& Sb,
                                              const std::vector<int>& group);

// True iff the merged potential v . xc + u is <= 0 (exact comparison, no
// epsilon: any positive value would break exact reconstruction at xc).
bool is_valid_subset(const Vector& v, double u, const Vector& xc);

// Greedy pairwise merging over ordered pairs (i, j), i < j: a pair of
// surviving groups is merged whenever the merged subset stays valid at the
// centroid. Expects sign-flipped (inactive canonical form) parameters, so
// every singleton is valid; throws std::invalid_argument otherwise.
// Deterministic; examines at most n(n-1)/2 candidate merges.
Partition valid_partition(const Matrix& SW, const Vector& Sb, const Vector& xc);

} // namespace ginnacer
