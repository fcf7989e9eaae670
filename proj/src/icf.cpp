#include "ginnacer/icf.hpp"

#include <stdexcept>

namespace ginnacer {

CentroidActivation activation_from_preactivation(const Vector& preactivation) {
    CentroidActivation act;
    const Index n = preactivation.size();
    act.active_mask.resize(static_cast<std::size_t>(n));
    act.sign.resize(n);
    for (Index i = 0; i < n; ++i) {
        const bool active = preactivation(i) >= 0.0;
        act.active_mask[static_cast<std::size_t>(i)] = active;
        act.sign(i) = active ? -1.0 : 1.0;
    }
    return act;
}

CentroidActivation centroid_activation(const Matrix& W, const Vector& b, const Vector& xc) {
    if (W.cols() != xc.size() || W.rows() != b.size())
        throw std::invalid_argument("centroid_activation: dimension mismatch");
    return activation_from_preactivation(detail::affine_rows_serial(W, b, xc));
}

CentroidContext compute_centroid_context(const Network& net, const Vector& centroid) {
    if (centroid.size() != net.input_dim())
        throw std::invalid_argument("compute_centroid_context: centroid has length " +
                                    std::to_string(centroid.size()) + ", network expects " +
                                    std::to_string(net.input_dim()));
    CentroidContext ctx;
    Vector c = centroid;
    for (const Layer& l : net.layers) {
        if (!l.relu)
            break;
        CentroidLayer entry;
        entry.centroid_in = c;
        const Vector pre = detail::affine_rows_serial(l.weights, l.bias, c);
        entry.activation = activation_from_preactivation(pre);
        c = relu(pre);
        entry.centroid_out = c;
        ctx.layers.push_back(std::move(entry));
    }
    return ctx;
}

Vector icf_eval(const Matrix& W, const Vector& b, const CentroidActivation& act, const Vector& x) {
    if (W.cols() != x.size() || W.rows() != b.size() || act.size() != W.rows())
        throw std::invalid_argument("icf_eval: dimension mismatch");
    const Vector y = W * x + b;
    Vector out(y.size());
    for (Index i = 0; i < y.size(); ++i) {
        const double r = act.sign(i) * y(i);
        const double t = act.active_mask[static_cast<std::size_t>(i)] ? y(i) : 0.0;
        out(i) = std::max(r, 0.0) + t;
    }
    return out;
}

Network build_pre_layers(const Network& net) {
    if (net.layers.empty() || !net.layers.front().relu)
        throw std::invalid_argument("build_pre_layers: network has no ReLU layer");
    const Index n0 = net.input_dim();

    Layer pre;
    pre.weights = Matrix::Zero(2 * n0, n0);
    pre.weights.topRows(n0) = Matrix::Identity(n0, n0);
    pre.weights.bottomRows(n0) = -Matrix::Identity(n0, n0);
    pre.bias = Vector::Zero(2 * n0);
    pre.relu = true;

    Layer first = net.layers.front();
    Matrix doubled(first.weights.rows(), 2 * n0);
    doubled.leftCols(n0) = first.weights;
    doubled.rightCols(n0) = -first.weights;
    first.weights = std::move(doubled);

    Network out;
    out.layers.reserve(net.layers.size() + 1);
    out.layers.push_back(std::move(pre));
    out.layers.push_back(std::move(first));
    for (std::size_t i = 1; i < net.layers.size(); ++i)
        out.layers.push_back(net.layers[i]);
    return out;
}

} // namespace ginnacer
