#include "ginnacer/baseline.hpp"

#include "serialize_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace ginnacer {

namespace {

using nlohmann::json;

Matrix parse_matrix(const json& rows, const std::string& what) {
    if (!rows.is_array() || rows.empty() || !rows[0].is_array())
        throw std::runtime_error(what + ": expected a non-empty array of rows");
    const std::size_t cols = rows[0].size();
    Matrix W(static_cast<Index>(rows.size()), static_cast<Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].is_array() || rows[i].size() != cols)
            throw std::runtime_error(what + ": ragged rows");
        for (std::size_t j = 0; j < cols; ++j)
            W(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j].get<double>();
    }
    return W;
}

Vector parse_vector(const json& arr, const std::string& what) {
    if (!arr.is_array())
        throw std::runtime_error(what + ": expected an array of numbers");
    Vector v(static_cast<Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i)
        v(static_cast<Index>(i)) = arr[i].get<double>();
    return v;
}

Layer parse_affine(const json& obj, const std::string& what, bool relu_flag) {
    if (!obj.is_object() || !obj.contains("weights") || !obj.contains("bias"))
        throw std::runtime_error(what + ": expected {\"weights\", \"bias\"}");
    Layer l;
    l.weights = parse_matrix(obj["weights"], what + " weights");
    l.bias = parse_vector(obj["bias"], what + " bias");
    l.relu = relu_flag;
    return l;
}

void append_affine(std::string& out, const Layer& l) {
    out += "{\"weights\":";
    detail::append_matrix(out, l.weights);
    out += ",\"bias\":";
    detail::append_vector(out, l.bias);
    out += '}';
}

BaselineLayer make_layer(const Layer& l, std::vector<std::vector<int>> groups) {
    // Canonical order: members ascending, groups by smallest member.
    for (auto& g : groups)
        std::sort(g.begin(), g.end());
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    BaselineLayer out;
    const auto h = static_cast<Index>(groups.size());
    out.w_max.resize(h, l.weights.cols());
    out.w_min.resize(h, l.weights.cols());
    out.b_max.resize(h);
    out.b_min.resize(h);
    out.group_index.assign(static_cast<std::size_t>(l.output_dim()), -1);
    for (Index k = 0; k < h; ++k) {
        const auto& g = groups[static_cast<std::size_t>(k)];
        out.w_max.row(k) = l.weights.row(g.front());
        out.w_min.row(k) = l.weights.row(g.front());
        out.b_max(k) = l.bias(g.front());
        out.b_min(k) = l.bias(g.front());
        for (std::size_t j = 1; j < g.size(); ++j) {
            out.w_max.row(k) = out.w_max.row(k).cwiseMax(l.weights.row(g[j]));
            out.w_min.row(k) = out.w_min.row(k).cwiseMin(l.weights.row(g[j]));
            out.b_max(k) = std::max(out.b_max(k), l.bias(g[j]));
            out.b_min(k) = std::min(out.b_min(k), l.bias(g[j]));
        }
        for (int i : g)
            out.group_index[static_cast<std::size_t>(i)] = static_cast<int>(k);
    }
    out.groups = std::move(groups);
    out.finalize_splits();
    return out;
}

} // namespace

void BaselineLayer::finalize_splits() {
    w_max_pos = w_max.cwiseMax(0.0);
    w_max_neg = w_max.cwiseMin(0.0);
    w_min_pos = w_min.cwiseMax(0.0);
    w_min_neg = w_min.cwiseMin(0.0);
}

void MergeBaseline::validate() const {
    Index dim = input_dim();
    if (pre_layer)
        dim = pre_layer->output_dim();
    std::size_t layer_no = 0;
    for (const BaselineLayer& l : layers) {
        ++layer_no;
        const std::string where = "baseline: layer " + std::to_string(layer_no);
        if (l.w_max.cols() != dim || l.w_min.cols() != dim)
            throw std::runtime_error(where + " dimension mismatch");
        if (l.b_max.size() != l.group_count() || l.b_min.size() != l.group_count())
            throw std::runtime_error(where + " bias length mismatch");
        if ((l.w_min.array() > l.w_max.array()).any() ||
            (l.b_min.array() > l.b_max.array()).any())
            throw std::runtime_error(where + " has min params above max params");
        for (int k : l.group_index)
            if (k < 0 || k >= l.group_count())
                throw std::runtime_error(where + " group index out of range");
        dim = l.neuron_count();
    }
    if (output_layer.input_dim() != dim)
        throw std::runtime_error("baseline: output layer dimension mismatch");
}

MergeBaseline build_merge_baseline(const Network& net, const std::vector<Index>& target_counts,
                                   std::uint64_t seed, const BaselineOptions& opts) {
    net.validate();
    const std::size_t m = net.relu_layer_count();
    if (target_counts.size() != m)
        throw std::invalid_argument("build_merge_baseline: expected " + std::to_string(m) +
                                    " target counts, got " + std::to_string(target_counts.size()));
    for (Index t : target_counts)
        if (t < 1)
            throw std::invalid_argument("build_merge_baseline: target group counts must be >= 1");

    std::vector<Layer> relu_layers(net.layers.begin(), net.layers.end() - 1);
    Layer output = net.layers.back();

    MergeBaseline bl;
    if (opts.apply_pre_layer && !relu_layers.empty()) {
        const Index n0 = net.input_dim();
        Layer pre;
        pre.weights = Matrix::Zero(2 * n0, n0);
        pre.weights.topRows(n0) = Matrix::Identity(n0, n0);
        pre.weights.bottomRows(n0) = -Matrix::Identity(n0, n0);
        pre.bias = Vector::Zero(2 * n0);
        pre.relu = true;
        bl.pre_layer = std::move(pre);

        Layer& first = relu_layers.front();
        Matrix doubled(first.weights.rows(), 2 * n0);
        doubled.leftCols(n0) = first.weights;
        doubled.rightCols(n0) = -first.weights;
        first.weights = std::move(doubled);
    }

    for (std::size_t li = 0; li < relu_layers.size(); ++li) {
        const Layer& l = relu_layers[li];
        const Index n = l.output_dim();
        const Index target = std::min(target_counts[li], n);

        // One stream per layer: a layer's merge sequence then only depends on
        // the seed and its own target, so raising a target elsewhere cannot
        // reshuffle this layer's groups.
        std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + li + 1);

        std::vector<std::vector<int>> groups(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i)
            groups[static_cast<std::size_t>(i)] = {static_cast<int>(i)};
        while (static_cast<Index>(groups.size()) > target) {
            std::uniform_int_distribution<std::size_t> pick(0, groups.size() - 1);
            const std::size_t a = pick(rng);
            std::uniform_int_distribution<std::size_t> pick_other(0, groups.size() - 2);
            std::size_t b = pick_other(rng);
            if (b >= a)
                ++b;
            auto& ga = groups[a];
            auto& gb = groups[b];
            ga.insert(ga.end(), gb.begin(), gb.end());
            groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(b));
        }

        bl.layers.push_back(make_layer(l, std::move(groups)));
        bl.relu_counts.push_back({n, bl.layers.back().group_count()});
    }
    bl.output_layer = std::move(output);
    return bl;
}

IntervalVector eval_merge_baseline(const MergeBaseline& bl, const Vector& x) {
    if (x.size() != bl.input_dim())
        throw std::invalid_argument("eval_merge_baseline: input has length " +
                                    std::to_string(x.size()) + ", baseline expects " +
                                    std::to_string(bl.input_dim()));
    IntervalVector iv = IntervalVector::degenerate(x);
    if (bl.pre_layer) {
        iv = affine_interval_map(bl.pre_layer->weights, bl.pre_layer->bias, iv);
        iv.lower = relu(iv.lower);
        iv.upper = relu(iv.upper);
    }
    for (const BaselineLayer& l : bl.layers) {
        const Vector up = relu(l.w_max_pos * iv.upper + l.w_max_neg * iv.lower + l.b_max);
        const Vector lo = relu(l.w_min_pos * iv.lower + l.w_min_neg * iv.upper + l.b_min);
        Vector upper(l.neuron_count());
        Vector lower(l.neuron_count());
        for (Index i = 0; i < l.neuron_count(); ++i) {
            const int k = l.group_index[static_cast<std::size_t>(i)];
            upper(i) = up(k);
            lower(i) = lo(k);
        }
        iv.lower = std::move(lower);
        iv.upper = std::move(upper);
    }
    return affine_interval_map(bl.output_layer.weights, bl.output_layer.bias, iv);
}

std::string baseline_to_json(const MergeBaseline& bl) {
    std::string out = "{\"pre_layer\":";
    if (bl.pre_layer)
        append_affine(out, *bl.pre_layer);
    else
        out += "null";
    out += ",\"layers\":[";
    for (std::size_t li = 0; li < bl.layers.size(); ++li) {
        if (li > 0)
            out += ',';
        const BaselineLayer& l = bl.layers[li];
        out += "{\"groups\":[";
        for (std::size_t k = 0; k < l.groups.size(); ++k) {
            if (k > 0)
                out += ',';
            out += '[';
            for (std::size_t j = 0; j < l.groups[k].size(); ++j) {
                if (j > 0)
                    out += ',';
                out += std::to_string(l.groups[k][j]);
            }
            out += ']';
        }
        out += "],\"W_max\":";
        detail::append_matrix(out, l.w_max);
        out += ",\"b_max\":";
        detail::append_vector(out, l.b_max);
        out += ",\"W_min\":";
        detail::append_matrix(out, l.w_min);
        out += ",\"b_min\":";
        detail::append_vector(out, l.b_min);
        out += '}';
    }
    out += "],\"output_layer\":";
    append_affine(out, bl.output_layer);
    out += ",\"relu_counts\":[";
    for (std::size_t i = 0; i < bl.relu_counts.size(); ++i) {
        if (i > 0)
            out += ',';
        out += '[' + std::to_string(bl.relu_counts[i].original) + ',' +
               std::to_string(bl.relu_counts[i].abstracted) + ']';
    }
    out += "]}";
    return out;
}

MergeBaseline baseline_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("baseline parse error: ") + e.what());
    }
    MergeBaseline bl;
    try {
        if (doc.contains("pre_layer") && !doc["pre_layer"].is_null())
            bl.pre_layer = parse_affine(doc["pre_layer"], "pre_layer", true);
        for (const json& jl : doc.at("layers")) {
            BaselineLayer l;
            for (const json& jg : jl.at("groups")) {
                std::vector<int> group;
                for (const json& ji : jg)
                    group.push_back(ji.get<int>());
                l.groups.push_back(std::move(group));
            }
            l.w_max = parse_matrix(jl.at("W_max"), "layer W_max");
            l.b_max = parse_vector(jl.at("b_max"), "layer b_max");
            l.w_min = parse_matrix(jl.at("W_min"), "layer W_min");
            l.b_min = parse_vector(jl.at("b_min"), "layer b_min");
            Index n = 0;
            for (const auto& g : l.groups)
                n += static_cast<Index>(g.size());
            l.group_index.assign(static_cast<std::size_t>(n), -1);
            for (std::size_t k = 0; k < l.groups.size(); ++k)
                for (int i : l.groups[k])
                    if (i >= 0 && i < n)
                        l.group_index[static_cast<std::size_t>(i)] = static_cast<int>(k);
            l.finalize_splits();
            bl.layers.push_back(std::move(l));
        }
        bl.output_layer = parse_affine(doc.at("output_layer"), "output_layer", false);
        for (const json& jc : doc.at("relu_counts")) {
            if (!jc.is_array() || jc.size() != 2)
                throw std::runtime_error("baseline: relu_counts entries must be pairs");
            bl.relu_counts.push_back({jc[0].get<Index>(), jc[1].get<Index>()});
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("baseline parse error: ") + e.what());
    }
    bl.validate();
    return bl;
}

MergeBaseline load_baseline(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open baseline file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return baseline_from_json(ss.str());
}

void save_baseline(const MergeBaseline& bl, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write baseline file: " + path);
    out << baseline_to_json(bl) << '\n';
}

} // namespace ginnacer
