#pragma once

#include "lira/nn.hpp"
#include "lira/spline.hpp"

namespace lira::flows {

using ad::Array;
using ad::Var;

struct FlowStackConfig {
    int dims = 1;                    // transformed dimensionality
    int layers = 2;
    SplineConfig spline;             // shared bins/bound/tau/odd
    int cond_in = 1;                 // conditioning input width
    std::vector<int> cond_hidden{32, 32};
    std::vector<nn::Hidden> cond_hidden_acts;  // empty -> all Squaresign
    std::string name = "flow";
};

/// Stack of conditional rational-spline layers. One conditioner network emits
/// the raw knot parameters for every layer; its last layer is zero-initialized
/// so a freshly built stack is exactly the identity map.
class FlowStack {
public:
    FlowStack() = default;
    FlowStack(const FlowStackConfig& cfg, Rng& rng);

    struct Result {
        Var out;      // [n, dims]
        Var log_det;  // [n], log|det d out / d in| of the applied direction
    };
    Result forward(const Var& u, const Var& cond) const;
    Result inverse(const Var& x, const Var& cond) const;

    struct ValueResult {
        Array out;
        Array log_det;
    };
    ValueResult forward_value(const Array& u, const Array& cond) const;
    ValueResult inverse_value(const Array& x, const Array& cond) const;

    const FlowStackConfig& config() const { return cfg_; }
    std::vector<Var> params() const { return conditioner_.params(); }

private:
    Var raw_for_layer(const Var& all, int layer) const;
    FlowStackConfig cfg_;
    nn::Mlp conditioner_;
};

} // namespace lira::flows
