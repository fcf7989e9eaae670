#include "ginnacer/partition.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ginnacer {

std::pair<Vector, double> merged_upper_params(const Matrix& SW, const Vector& Sb,
                                              const std::vector<int>& group) {
    if (group.empty())
        throw std::invalid_argument("merged_upper_params: empty group");
    Vector v;
    double u = 0.0;
    bool first = true;
    for (int i : group) {
        if (i < 0 || i >= SW.rows())
            throw std::invalid_argument("merged_upper_params: neuron index " + std::to_string(i) +
                                        " out of range");
        if (first) {
            v = SW.row(i).transpose();
            u = Sb(i);
            first = false;
        } else {
            v = v.cwiseMax(SW.row(i).transpose());
            u = std::max(u, Sb(i));
        }
    }
    return {std::move(v), u};
}

bool is_valid_subset(const Vector& v, double u, const Vector& xc) {
    if (v.size() != xc.size())
        throw std::invalid_argument("is_valid_subset: dimension mismatch");
    return detail::dot_serial(v.data(), xc.data(), v.size()) + u <= 0.0;
}

Partition valid_partition(const Matrix& SW, const Vector& Sb, const Vector& xc) {
    const Index n = SW.rows();
    const Index nin = SW.cols();
    if (Sb.size() != n || xc.size() != nin)
        throw std::invalid_argument("valid_partition: dimension mismatch");

    // Working state: row i of V and u(i) hold the merged params of the group
    // whose smallest member is i, while that group survives.
    Matrix V = SW;
    Vector u = Sb;
    std::vector<std::vector<int>> members(static_cast<std::size_t>(n));
    std::vector<bool> alive(static_cast<std::size_t>(n), true);
    for (Index i = 0; i < n; ++i)
        members[static_cast<std::size_t>(i)] = {static_cast<int>(i)};

    for (Index i = 0; i < n; ++i) {
        const double rhat = detail::dot_serial(V.row(i).data(), xc.data(), nin) + u(i);
        if (rhat > 0.0)
            throw std::invalid_argument(
                "valid_partition: neuron " + std::to_string(i) + " has positive potential " +
                std::to_string(rhat) + " at the centroid; layer is not in inactive canonical form");
    }

    Partition part;
    RowVector merged(nin);
    for (Index i = 0; i + 1 < n; ++i) {
        if (!alive[static_cast<std::size_t>(i)])
            continue;
        for (Index j = i + 1; j < n; ++j) {
            if (!alive[static_cast<std::size_t>(j)])
                continue;
            ++part.candidate_merges;
            merged = V.row(i).cwiseMax(V.row(j));
            const double mu = std::max(u(i), u(j));
            const double rhat = detail::dot_serial(merged.data(), xc.data(), nin) + mu;
            if (rhat <= 0.0) {
                V.row(i) = merged;
                u(i) = mu;
                auto& mi = members[static_cast<std::size_t>(i)];
                auto& mj = members[static_cast<std::size_t>(j)];
                mi.insert(mi.end(), mj.begin(), mj.end());
                mj.clear();
                alive[static_cast<std::size_t>(j)] = false;
            }
        }
    }

    const auto h = static_cast<Index>(std::count(alive.begin(), alive.end(), true));
    part.groups.reserve(static_cast<std::size_t>(h));
    part.merged_weights.resize(h, nin);
    part.merged_biases.resize(h);
    Index k = 0;
    for (Index i = 0; i < n; ++i) {
        if (!alive[static_cast<std::size_t>(i)])
            continue;
        auto& group = members[static_cast<std::size_t>(i)];
        std::sort(group.begin(), group.end());
        part.merged_weights.row(k) = V.row(i);
        part.merged_biases(k) = u(i);
        // Re-derive validity from the stored parameters, not the incremental
        // loop state; any positive potential is rejected.
        if (!is_valid_subset(part.merged_weights.row(k).transpose(), part.merged_biases(k), xc))
            throw std::logic_error("valid_partition: stored group " + std::to_string(k) +
                                   " fails the centroid validity check");
        part.groups.push_back(std::move(group));
        ++k;
    }
    return part;
}

} // namespace ginnacer
