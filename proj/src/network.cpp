#include "ginnacer/network.hpp"

#include "serialize_util.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ginnacer {

namespace {

using nlohmann::json;

Matrix parse_matrix(const json& rows, std::size_t layer_no) {
    if (!rows.is_array() || rows.empty())
        throw std::runtime_error("layer " + std::to_string(layer_no) +
                                 ": \"weights\" must be a non-empty array of rows");
    const std::size_t cols = rows[0].size();
    Matrix W(static_cast<Index>(rows.size()), static_cast<Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const json& row = rows[i];
        if (!row.is_array() || row.size() != cols)
            throw std::runtime_error("layer " + std::to_string(layer_no) +
                                     ": ragged weight rows");
        for (std::size_t j = 0; j < cols; ++j) {
            if (!row[j].is_number())
                throw std::runtime_error("layer " + std::to_string(layer_no) +
                                         ": non-numeric weight entry");
            W(static_cast<Index>(i), static_cast<Index>(j)) = row[j].get<double>();
        }
    }
    return W;
}

Vector parse_vector(const json& arr, const std::string& what) {
    if (!arr.is_array())
        throw std::runtime_error(what + " must be an array of numbers");
    Vector v(static_cast<Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number())
            throw std::runtime_error(what + ": non-numeric entry");
        v(static_cast<Index>(i)) = arr[i].get<double>();
    }
    return v;
}

} // namespace

std::size_t Network::relu_layer_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers)
        if (l.relu)
            ++n;
    return n;
}

void Network::validate() const {
    if (layers.empty())
        throw std::runtime_error("network has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const Layer& l = layers[i];
        const std::string where = "layer " + std::to_string(i + 1);
        if (l.bias.size() != l.weights.rows())
            throw std::runtime_error(where + ": bias length " + std::to_string(l.bias.size()) +
                                     " does not match weight rows " +
                                     std::to_string(l.weights.rows()));
        if (i > 0 && l.weights.cols() != layers[i - 1].weights.rows())
            throw std::runtime_error(where + ": expects " + std::to_string(l.weights.cols()) +
                                     " inputs but layer " + std::to_string(i) + " produces " +
                                     std::to_string(layers[i - 1].weights.rows()));
        if (!l.weights.allFinite() || !l.bias.allFinite())
            throw std::runtime_error(where + ": non-finite weight or bias value");
        const bool last = (i + 1 == layers.size());
        if (last && l.relu)
            throw std::runtime_error("final layer must have relu=false");
        if (!last && !l.relu)
            throw std::runtime_error(where + ": only the final layer may have relu=false");
    }
}

bool IntervalVector::contains(const Vector& x, double slack) const {
    if (x.size() != lower.size())
        return false;
    return (x.array() >= lower.array() - slack).all() &&
           (x.array() <= upper.array() + slack).all();
}

bool IntervalVector::contains(const IntervalVector& inner, double slack) const {
    if (inner.size() != size())
        return false;
    return (inner.lower.array() >= lower.array() - slack).all() &&
           (inner.upper.array() <= upper.array() + slack).all();
}

void IntervalVector::validate() const {
    if (lower.size() != upper.size())
        throw std::runtime_error("interval bounds have mismatched lengths");
    if ((lower.array() > upper.array()).any())
        throw std::runtime_error("interval has lower > upper");
}

Network network_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("network parse error: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array() ||
        doc["layers"].empty())
        throw std::runtime_error("network parse error: expected {\"layers\": [...]}");

    Network net;
    std::size_t layer_no = 0;
    for (const json& jl : doc["layers"]) {
        ++layer_no;
        if (!jl.is_object() || !jl.contains("weights") || !jl.contains("bias") ||
            !jl.contains("relu"))
            throw std::runtime_error("layer " + std::to_string(layer_no) +
                                     ": expected {\"weights\", \"bias\", \"relu\"}");
        Layer l;
        l.weights = parse_matrix(jl["weights"], layer_no);
        l.bias = parse_vector(jl["bias"], "layer " + std::to_string(layer_no) + " bias");
        if (!jl["relu"].is_boolean())
            throw std::runtime_error("layer " + std::to_string(layer_no) +
                                     ": \"relu\" must be a boolean");
        l.relu = jl["relu"].get<bool>();
        net.layers.push_back(std::move(l));
    }
    net.validate();
    return net;
}

std::string network_to_json(const Network& net) {
    std::string out = "{\"layers\":[";
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        if (i > 0)
            out += ',';
        const Layer& l = net.layers[i];
        out += "{\"weights\":";
        detail::append_matrix(out, l.weights);
        out += ",\"bias\":";
        detail::append_vector(out, l.bias);
        out += ",\"relu\":";
        out += l.relu ? "true" : "false";
        out += '}';
    }
    out += "]}";
    return out;
}

Network load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open network file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return network_from_json(ss.str());
}

void save_network(const Network& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write network file: " + path);
    out << network_to_json(net) << '\n';
}

Vector forward(const Network& net, const Vector& x) {
    if (x.size() != net.input_dim())
        throw std::invalid_argument("forward: input has length " + std::to_string(x.size()) +
                                    ", network expects " + std::to_string(net.input_dim()));
    Vector v = x;
    for (const Layer& l : net.layers) {
        v = l.weights * v + l.bias;
        if (l.relu)
            v = relu(v);
    }
    return v;
}

IntervalVector affine_interval_map(const Matrix& W, const Vector& b, const IntervalVector& in) {
    if (W.cols() != in.size() || W.rows() != b.size())
        throw std::invalid_argument("affine_interval_map: dimension mismatch");
    const Matrix Wp = W.cwiseMax(0.0);
    const Matrix Wm = W.cwiseMin(0.0);
    IntervalVector out;
    out.upper = Wp * in.upper + Wm * in.lower + b;
    out.lower = Wp * in.lower + Wm * in.upper + b;
    return out;
}

IntervalVector interval_forward(const Network& net, const IntervalVector& in) {
    if (in.size() != net.input_dim())
        throw std::invalid_argument("interval_forward: input has length " +
                                    std::to_string(in.size()) + ", network expects " +
                                    std::to_string(net.input_dim()));
    IntervalVector iv = in;
    for (const Layer& l : net.layers) {
        iv = affine_interval_map(l.weights, l.bias, iv);
        if (l.relu) {
            iv.lower = relu(iv.lower);
            iv.upper = relu(iv.upper);
        }
    }
    return iv;
}

} // namespace ginnacer
