#pragma once

#include "ginnacer/network.hpp"

#include <vector>

namespace ginnacer {

// Which ReLUs of a layer are active at the centroid. `sign` is +1 for
// inactive neurons and -1 for active ones (sign_i = 1 - 2 * active_i); a
// pre-activation of exactly zero counts as active.
struct CentroidActivation {
    std::vector<bool> active_mask;
    Vector sign;

    Index size() const { return sign.size(); }
};

struct CentroidLayer {
    CentroidActivation activation;
    Vector centroid_in;
    Vector centroid_out;
};

// Activation pattern and propagated centroid for every ReLU layer.
struct CentroidContext {
    std::vector<CentroidLayer> layers;
};

// Classifies each neuron by the sign of W xc + b. The pre-activation is
// computed with detail::affine_rows_serial so partition validity checks on
// sign-flipped weights see exactly the same rounding.
CentroidActivation centroid_activation(const Matrix& W, const Vector& b, const Vector& xc);

CentroidActivation activation_from_preactivation(const Vector& preactivation);

CentroidContext compute_centroid_context(const Network& net, const Vector& centroid);

// Evaluates the layer in inactive canonical form: r = S(Wx+b), t = A(Wx+b),
// output sigma(r) + t. Identical to relu(Wx+b) for every x; at the centroid
// the internal r is elementwise <= 0.
Vector icf_eval(const Matrix& W, const Vector& b, const CentroidActivation& act, const Vector& x);

// Lossless transform that prepends a ReLU layer computing (relu(x), relu(-x))
// and rewrites the first following layer as [W, -W], so that every layer of
// the result receives nonnegative inputs. Preserves forward exactly.
Network build_pre_layers(const Network& net);

} // namespace ginnacer
