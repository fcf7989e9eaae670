#include "ginnacer/abstraction.hpp"

#include "ginnacer/icf.hpp"
#include "serialize_util.hpp"

#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace ginnacer {

namespace {

using nlohmann::json;

void emit_warning(const BuildOptions& opts, const std::string& msg) {
    if (opts.warn)
        opts.warn(msg);
    else
        std::cerr << "warning: " << msg << '\n';
}

bool apply_pre_layer(const BuildOptions& opts) {
    switch (opts.neg_input) {
    case NegInput::On:
        return true;
    case NegInput::Off:
        return false;
    case NegInput::Auto:
        return !(opts.domain_lower && (opts.domain_lower->array() >= 0.0).all());
    }
    return true;
}

IntervalVector relu_interval(IntervalVector iv) {
    iv.lower = relu(iv.lower);
    iv.upper = relu(iv.upper);
    return iv;
}

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

} // namespace

void LayerAbstraction::finalize_splits() {
    V_pos = V.cwiseMax(0.0);
    V_neg = V.cwiseMin(0.0);
    AW_pos = AW.cwiseMax(0.0);
    AW_neg = AW.cwiseMin(0.0);
}

void GinnacerAbstraction::validate() const {
    Index dim = centroid.size();
    if (dim <= 0)
        throw std::runtime_error("abstraction: empty centroid");
    if (pre_layer) {
        if (pre_layer->input_dim() != dim)
            throw std::runtime_error("abstraction: pre-layer input dimension mismatch");
        dim = pre_layer->output_dim();
    }
    std::size_t layer_no = 0;
    for (const Layer& l : prefix_layers) {
        ++layer_no;
        if (l.input_dim() != dim || l.bias.size() != l.output_dim())
            throw std::runtime_error("abstraction: exact layer " + std::to_string(layer_no) +
                                     " dimension mismatch");
        if (!l.weights.allFinite() || !l.bias.allFinite())
            throw std::runtime_error("abstraction: exact layer " + std::to_string(layer_no) +
                                     " has non-finite parameters");
        dim = l.output_dim();
    }
    for (const LayerAbstraction& la : layers) {
        ++layer_no;
        const std::string where = "abstraction: layer " + std::to_string(layer_no);
        const Index n = la.neuron_count();
        const Index h = la.group_count();
        if (la.input_dim() != dim || la.V.cols() != dim)
            throw std::runtime_error(where + " dimension mismatch");
        if (la.u.size() != h || la.Ab.size() != n)
            throw std::runtime_error(where + " bias length mismatch");
        if (static_cast<Index>(la.groups.size()) != h || h < 1 || h > n)
            throw std::runtime_error(where + " has an invalid group count");
        if (static_cast<Index>(la.group_index.size()) != n)
            throw std::runtime_error(where + " group index length mismatch");
        if (!la.V.allFinite() || !la.u.allFinite() || !la.AW.allFinite() || !la.Ab.allFinite())
            throw std::runtime_error(where + " has non-finite parameters");
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        for (std::size_t k = 0; k < la.groups.size(); ++k) {
            if (la.groups[k].empty())
                throw std::runtime_error(where + " contains an empty group");
            for (int i : la.groups[k]) {
                if (i < 0 || i >= n || seen[static_cast<std::size_t>(i)])
                    throw std::runtime_error(where + " groups are not a disjoint cover");
                seen[static_cast<std::size_t>(i)] = true;
                if (la.group_index[static_cast<std::size_t>(i)] != static_cast<int>(k))
                    throw std::runtime_error(where + " group index disagrees with groups");
            }
        }
        for (bool s : seen)
            if (!s)
                throw std::runtime_error(where + " groups do not cover every neuron");
        dim = n;
    }
    if (output_layer.input_dim() != dim)
        throw std::runtime_error("abstraction: output layer dimension mismatch");
    if (!output_layer.weights.allFinite() || !output_layer.bias.allFinite())
        throw std::runtime_error("abstraction: output layer has non-finite parameters");
    if (relu_counts.size() != prefix_layers.size() + layers.size())
        throw std::runtime_error("abstraction: relu_counts length mismatch");
    Index sum_orig = 0;
    Index sum_abs = 0;
    for (const ReluLayerCount& rc : relu_counts) {
        sum_orig += rc.original;
        sum_abs += rc.abstracted;
    }
    if (sum_abs > sum_orig)
        throw std::runtime_error("abstraction: more ReLUs than the original network");
}

GinnacerAbstraction build_ginnacer(const Network& net, const Vector& centroid,
                                   const BuildOptions& opts) {
    net.validate();
    if (centroid.size() != net.input_dim())
        throw std::invalid_argument("build_ginnacer: centroid has length " +
                                    std::to_string(centroid.size()) + ", network expects " +
                                    std::to_string(net.input_dim()));
    const std::size_t m = net.relu_layer_count();
    if (opts.skip_layers > m)
        throw std::invalid_argument("build_ginnacer: skip_layers " +
                                    std::to_string(opts.skip_layers) + " out of range (network has " +
                                    std::to_string(m) + " ReLU layers)");

    const bool use_pre = apply_pre_layer(opts);
    if (!use_pre && (centroid.array() < 0.0).any())
        emit_warning(opts, "pre-layer disabled but the centroid has negative entries; "
                           "bounds are sound only if all network inputs are nonnegative");

    GinnacerAbstraction g;
    g.centroid = centroid;
    Vector c = centroid;

    std::vector<Layer> relu_layers(net.layers.begin(), net.layers.end() - 1);
    Layer output = net.layers.back();

    if (use_pre) {
        const Index n0 = net.input_dim();
        Layer pre;
        pre.weights = Matrix::Zero(2 * n0, n0);
        pre.weights.topRows(n0) = Matrix::Identity(n0, n0);
        pre.weights.bottomRows(n0) = -Matrix::Identity(n0, n0);
        pre.bias = Vector::Zero(2 * n0);
        pre.relu = true;
        g.pre_layer = std::move(pre);

        Layer& first = relu_layers.empty() ? output : relu_layers.front();
        Matrix doubled(first.weights.rows(), 2 * n0);
        doubled.leftCols(n0) = first.weights;
        doubled.rightCols(n0) = -first.weights;
        first.weights = std::move(doubled);

        Vector c2(2 * n0);
        c2.head(n0) = relu(c);
        c2.tail(n0) = relu(-c);
        c = std::move(c2);
    }

    for (std::size_t li = 0; li < relu_layers.size(); ++li) {
        Layer& l = relu_layers[li];
        const Index n = l.output_dim();
        const Vector pre_act = detail::affine_rows_serial(l.weights, l.bias, c);
        if (li < opts.skip_layers) {
            c = relu(pre_act);
            g.relu_counts.push_back({n, n});
            g.prefix_layers.push_back(std::move(l));
            continue;
        }
        const CentroidActivation act = activation_from_preactivation(pre_act);
        const Matrix SW = act.sign.asDiagonal() * l.weights;
        const Vector Sb = act.sign.cwiseProduct(l.bias);
        Partition part = valid_partition(SW, Sb, c);

        LayerAbstraction la;
        la.V = std::move(part.merged_weights);
        la.u = std::move(part.merged_biases);
        la.groups = std::move(part.groups);
        la.group_index.assign(static_cast<std::size_t>(n), 0);
        for (std::size_t k = 0; k < la.groups.size(); ++k)
            for (int i : la.groups[k])
                la.group_index[static_cast<std::size_t>(i)] = static_cast<int>(k);
        la.AW = l.weights;
        la.Ab = l.bias;
        for (Index i = 0; i < n; ++i) {
            if (!act.active_mask[static_cast<std::size_t>(i)]) {
                la.AW.row(i).setZero();
                la.Ab(i) = 0.0;
            }
        }
        la.finalize_splits();
        g.relu_counts.push_back({n, la.group_count()});
        g.layers.push_back(std::move(la));
        c = relu(pre_act);
    }

    g.output_layer = std::move(output);
    return g;
}

IntervalVector eval_ginnacer_interval(const GinnacerAbstraction& g, const IntervalVector& in) {
    if (in.size() != g.input_dim())
        throw std::invalid_argument("eval_ginnacer_interval: input has length " +
                                    std::to_string(in.size()) + ", abstraction expects " +
                                    std::to_string(g.input_dim()));
    in.validate();

    IntervalVector iv = in;
    if (g.pre_layer)
        iv = relu_interval(affine_interval_map(g.pre_layer->weights, g.pre_layer->bias, iv));
    for (const Layer& l : g.prefix_layers)
        iv = relu_interval(affine_interval_map(l.weights, l.bias, iv));

    for (const LayerAbstraction& la : g.layers) {
        const Vector r_up = la.V_pos * iv.upper + la.V_neg * iv.lower + la.u;
        const Vector t_up = la.AW_pos * iv.upper + la.AW_neg * iv.lower + la.Ab;
        Vector t_lo = la.AW_pos * iv.lower + la.AW_neg * iv.upper + la.Ab;
        const Vector shared = relu(r_up);
        Vector upper(la.neuron_count());
        for (Index i = 0; i < la.neuron_count(); ++i)
            upper(i) = shared(la.group_index[static_cast<std::size_t>(i)]) + t_up(i);
        iv.lower = std::move(t_lo);
        iv.upper = std::move(upper);
    }

    return affine_interval_map(g.output_layer.weights, g.output_layer.bias, iv);
}

IntervalVector eval_ginnacer(const GinnacerAbstraction& g, const Vector& x) {
    return eval_ginnacer_interval(g, IntervalVector::degenerate(x));
}

ReluStats relu_stats(const GinnacerAbstraction& g) {
    ReluStats stats;
    stats.layers.reserve(g.relu_counts.size());
    for (const ReluLayerCount& rc : g.relu_counts) {
        const double pct = rc.original > 0
                               ? 100.0 * static_cast<double>(rc.abstracted) /
                                     static_cast<double>(rc.original)
                               : 100.0;
        stats.layers.push_back({rc.original, rc.abstracted, pct});
        stats.total_original += rc.original;
        stats.total_abstracted += rc.abstracted;
    }
    if (g.pre_layer)
        stats.pre_layer_relus = g.pre_layer->output_dim();
    return stats;
}

std::string abstraction_to_json(const GinnacerAbstraction& g) {
    std::string out = "{\"pre_layer\":";
    if (g.pre_layer)
        append_affine(out, *g.pre_layer);
    else
        out += "null";
    out += ",\"exact_prefix\":" + std::to_string(g.exact_prefix());
    out += ",\"prefix_layers\":[";
    for (std::size_t i = 0; i < g.prefix_layers.size(); ++i) {
        if (i > 0)
            out += ',';
        append_affine(out, g.prefix_layers[i]);
    }
    out += "],\"layers\":[";
    for (std::size_t li = 0; li < g.layers.size(); ++li) {
        if (li > 0)
            out += ',';
        const LayerAbstraction& la = g.layers[li];
        out += "{\"groups\":[";
        for (std::size_t k = 0; k < la.groups.size(); ++k) {
            if (k > 0)
                out += ',';
            out += '[';
            for (std::size_t j = 0; j < la.groups[k].size(); ++j) {
                if (j > 0)
                    out += ',';
                out += std::to_string(la.groups[k][j]);
            }
            out += ']';
        }
        out += "],\"V\":";
        detail::append_matrix(out, la.V);
        out += ",\"u\":";
        detail::append_vector(out, la.u);
        out += ",\"AW\":";
        detail::append_matrix(out, la.AW);
        out += ",\"Ab\":";
        detail::append_vector(out, la.Ab);
        out += '}';
    }
    out += "],\"output_layer\":";
    append_affine(out, g.output_layer);
    out += ",\"centroid\":";
    detail::append_vector(out, g.centroid);
    out += ",\"relu_counts\":[";
    for (std::size_t i = 0; i < g.relu_counts.size(); ++i) {
        if (i > 0)
            out += ',';
        out += '[' + std::to_string(g.relu_counts[i].original) + ',' +
               std::to_string(g.relu_counts[i].abstracted) + ']';
    }
    out += "]}";
    return out;
}

GinnacerAbstraction abstraction_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("abstraction parse error: ") + e.what());
    }
    if (!doc.is_object())
        throw std::runtime_error("abstraction parse error: expected a JSON object");

    GinnacerAbstraction g;
    try {
        if (doc.contains("pre_layer") && !doc["pre_layer"].is_null())
            g.pre_layer = parse_affine(doc["pre_layer"], "pre_layer", true);
        const auto prefix = doc.value("exact_prefix", std::size_t{0});
        if (doc.contains("prefix_layers")) {
            for (const json& jl : doc["prefix_layers"])
                g.prefix_layers.push_back(parse_affine(jl, "prefix layer", true));
        }
        if (g.prefix_layers.size() != prefix)
            throw std::runtime_error("abstraction: exact_prefix does not match prefix_layers");
        for (const json& jl : doc.at("layers")) {
            LayerAbstraction la;
            for (const json& jg : jl.at("groups")) {
                std::vector<int> group;
                for (const json& ji : jg)
                    group.push_back(ji.get<int>());
                la.groups.push_back(std::move(group));
            }
            la.V = parse_matrix(jl.at("V"), "layer V");
            la.u = parse_vector(jl.at("u"), "layer u");
            la.AW = parse_matrix(jl.at("AW"), "layer AW");
            la.Ab = parse_vector(jl.at("Ab"), "layer Ab");
            la.group_index.assign(static_cast<std::size_t>(la.AW.rows()), -1);
            for (std::size_t k = 0; k < la.groups.size(); ++k)
                for (int i : la.groups[k])
                    if (i >= 0 && i < la.AW.rows())
                        la.group_index[static_cast<std::size_t>(i)] = static_cast<int>(k);
            la.finalize_splits();
            g.layers.push_back(std::move(la));
        }
        g.output_layer = parse_affine(doc.at("output_layer"), "output_layer", false);
        g.centroid = parse_vector(doc.at("centroid"), "centroid");
        for (const json& jc : doc.at("relu_counts")) {
            if (!jc.is_array() || jc.size() != 2)
                throw std::runtime_error("abstraction: relu_counts entries must be pairs");
            g.relu_counts.push_back({jc[0].get<Index>(), jc[1].get<Index>()});
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("abstraction parse error: ") + e.what());
    }
    g.validate();
    return g;
}

GinnacerAbstraction load_abstraction(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open abstraction file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return abstraction_from_json(ss.str());
}

void save_abstraction(const GinnacerAbstraction& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write abstraction file: " + path);
    out << abstraction_to_json(g) << '\n';
}

} // namespace ginnacer
