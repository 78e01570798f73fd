#pragma once

#include "lira/distributions.hpp"
#include "lira/flows.hpp"

namespace lira::model {

using ad::Array;
using ad::Var;

struct WorldModelConfig {
    int state_dim = 1;
    int action_dim = 1;
    int reward_dim = 1;
    int dist_dim = 1;
    std::vector<int> hidden{100, 100};
    int flow_layers = 2;
    int flow_bins = 8;
    double flow_bound = 5.0;   // residual spline bound, in standard units
    double tau = 0.99;
    std::vector<int> cond_hidden{32, 32};
    double scale_floor = 1e-3;
    bool odd_flow = true;      // false disables the symmetry restriction

    int target_dim() const { return state_dim + reward_dim; }
};

/// Gaussian world model over the joint target x = (s', r) with a conditional
/// residual flow. The marginalized density is the diagonal Gaussian itself;
/// the disturbance-aware density pushes the standardized residual through an
/// odd spline stack conditioned on the disturbance, so the predictive mean is
/// shared between both densities by construction.
class WorldModel {
public:
    WorldModel() = default;
    WorldModel(const WorldModelConfig& cfg, Rng& rng);

    const WorldModelConfig& config() const { return cfg_; }

    struct Heads {
        Var loc;    // [n, target_dim]
        Var scale;  // [n, target_dim], >= scale_floor
    };
    /// Trunk forward for a batch; s [n,sd], a [n,ad] (typically constants).
    Heads heads(const Var& s, const Var& a) const;

    /// Per-row log-density of targets x [n, target_dim].
    Var marg_log_prob(const Heads& h, const Var& x) const;
    /// Disturbance-aware variant; d [n, dist_dim] may carry graph (GRL path).
    Var aware_log_prob(const Heads& h, const Var& x, const Var& d) const;

    // Value paths.
    void predict_value(const Array& sa, Array& loc, Array& scale) const;
    Array sample_marginal(const Array& loc, const Array& scale, int row, Rng& rng) const;
    Array sample_aware(const Array& loc, const Array& scale, const Array& d,
                       int row, Rng& rng) const;

    const flows::FlowStack& flow() const { return flow_; }
    std::vector<Var> params() const;

private:
    WorldModelConfig cfg_;
    nn::Mlp trunk_;           // (s,a) -> [loc | raw scale]
    flows::FlowStack flow_;   // residual flow conditioned on d
};

} // namespace lira::model
