#pragma once

#include "lira/array.hpp"
#include "lira/rng.hpp"

#include <vector>

namespace lira::plan {

using ad::Array;

struct PlannerConfig {
    int candidates = 256;        // small-scale default; 1024 at simulation scale
    double elite_frac = 0.25;
    int iterations = 4;
    double step_size = 0.25;
    double inv_temp = 1.0;
    double neg_ratio = 1.0;      // reserved pass-through knob, inert by default
    double slowdown = 0.5;
    int horizon = 12;

    int elite_count() const {
        const int k = static_cast<int>(static_cast<double>(candidates) * elite_frac);
        return k < 2 ? 2 : k;
    }
    bool valid() const { return candidates >= 8 && elite_count() >= 2 && horizon >= 1; }
};

/// Per-horizon-step diagonal Gaussian over action sequences, plus the
/// acceleration (momentum) state carried across refinement iterations.
struct PlannerPolicy {
    Array mean;   // [H, action_dim]
    Array scale;  // [H, action_dim], > 0
    Array vel;    // [H, action_dim]
};

/// Read-only batched mean-prediction interface used for rollouts; the planner
/// consumes only the disturbance-marginalized predictive means.
class DynamicsModel {
public:
    virtual ~DynamicsModel() = default;
    virtual int state_dim() const = 0;
    virtual int action_dim() const = 0;
    virtual int reward_dim() const = 0;
    /// s [n, state_dim], a [n, action_dim] -> s_next [n, state_dim], r [n, reward_dim].
    virtual void predict_mean(const Array& s, const Array& a, Array& s_next,
                              Array& r) const = 0;
};

/// Fresh policy: zero mean, scale = quarter the action range, zero momentum.
PlannerPolicy initial_policy(const PlannerConfig& cfg, int action_dim, double a_lo,
                             double a_hi);

/// Time-shift `prev` by one step (repeating its last row), then blend `init`
/// toward the shifted policy by the step size. Momentum is reset.
PlannerPolicy warm_start(const PlannerPolicy& prev, const PlannerPolicy& init,
                         const PlannerConfig& cfg);

/// Return of one action sequence [H, action_dim] under the model's mean
/// predictions: sum of predicted rewards over all steps and reward dims.
/// Any non-finite prediction scores the rollout -inf.
double rollout_return(const DynamicsModel& model, const Array& s0, const Array& actions);

struct PlanResult {
    Array first_action;     // executed action (mean when !explore, sampled otherwise)
    PlannerPolicy policy;   // refined policy
    double mean_return;     // rollout return of the final policy mean
};

/// Iteratively refines the policy by sampled MPC: sample candidates, keep the
/// elite quarter by return, softmax-weight them, and move mean/scale toward
/// the weighted statistics with a momentum term. Deterministic given the rng.
PlanResult plan(const Array& s0, const DynamicsModel& model, PlannerPolicy policy,
                const PlannerConfig& cfg, double a_lo, double a_hi, bool explore,
                Rng& rng);

} // namespace lira::plan
