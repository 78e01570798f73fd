#pragma once

#include "lira/distributions.hpp"
#include "lira/flows.hpp"

namespace lira::model {

using ad::Array;
using ad::Var;

struct AdversaryConfig {
    int state_dim = 1;
    int dist_dim = 1;
    double d_max = 1.0;
    int flow_layers = 2;
    int flow_bins = 8;
    double tau = 0.99;
    std::vector<int> feature_hidden{100, 100};
    std::vector<int> head_hidden{32, 32};
};

/// State-conditioned disturbance distribution: a uniform base on the box
/// [-d_max, d_max]^dist_dim pushed through a conditional spline stack whose
/// knots are produced from state features. Samples therefore always lie in
/// the closed box.
class Adversary {
public:
    Adversary() = default;
    Adversary(const AdversaryConfig& cfg, Rng& rng);

    const AdversaryConfig& config() const { return cfg_; }

    Array sample(const Array& state, Rng& rng) const;      // one disturbance row

    /// Per-row log-density at x [n, dist_dim] (graph-carrying or constant),
    /// conditioned on states [n, state_dim]; differentiable pullback.
    Var log_prob(const Var& x, const Var& states) const;

    /// Buffered-disturbance resampling: numerically reproduces d while carrying
    /// the graph of the current parameters through the forward pass only (the
    /// inverse is detached, matching the kept-graph streaming gradient).
    Var resample(const Array& d, const Array& states) const;

    /// Monte-Carlo estimate of KL(adversary || prior) at the given samples.
    Var kl_mc(const dist::ClippedGaussian& prior, const Var& samples,
              const Var& states) const;

    /// Sample standard deviation per coordinate, pooled over the given states.
    double sample_std(const Array& states, int draws_per_state, Rng& rng) const;

    const flows::FlowStack& flow() const { return flow_; }
    std::vector<Var> params() const { return flow_.params(); }

private:
    AdversaryConfig cfg_;
    flows::FlowStack flow_;
};

} // namespace lira::model
