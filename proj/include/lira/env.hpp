#pragma once

#include "lira/array.hpp"
#include "lira/rng.hpp"

#include <memory>
#include <string>

namespace lira::env {

using ad::Array;

struct StepResult {
    Array s_next;
    Array r;           // reward vector, dim >= 1
    bool terminated = false;
    bool truncated = false;
};

/// Disturbable environment contract. `step` is a pure function of
/// (s, a, d, t, rng): any process noise comes from the explicit rng stream.
/// Out-of-bounds actions/disturbances are clamped and counted, never rejected.
class Env {
public:
    virtual ~Env() = default;

    virtual std::string name() const = 0;
    virtual int state_dim() const = 0;
    virtual int action_dim() const = 0;
    virtual int dist_dim() const = 0;
    virtual int reward_dim() const = 0;
    virtual double action_low() const = 0;
    virtual double action_high() const = 0;
    virtual double d_max() const = 0;
    virtual int t_max() const = 0;

    virtual Array reset(Rng& rng) = 0;
    virtual StepResult step(const Array& s, const Array& a, const Array& d, int t,
                            Rng& rng) = 0;

    long clamp_events() const { return clamp_events_; }

protected:
    /// Clamp helper shared by implementations; counts violations.
    double bounded(double v, double lo, double hi) {
        if (v < lo || v > hi) {
            ++clamp_events_;
            return v < lo ? lo : hi;
        }
        return v;
    }
    long clamp_events_ = 0;
};

/// Planar point mass holding position near the origin under force
/// disturbances. State [px, py, vx, vy]; action = 2-dim force in [-1, 1];
/// disturbance = 2-dim unit-scaled extra force. Semi-implicit Euler with
/// viscous damping. Reward components: proximity 1 - min(1, |p|/0.2) and
/// action regulariser 0.1 - 0.1*|a|_1; episode ends when |p| > 0.5.
class PointMassPush final : public Env {
public:
    struct Params {
        double dt = 0.05;
        double mass = 1.0;
        double damping = 2.0;
        double dist_gain = 0.5;
        double d_max = 1.0;
        double reset_radius = 0.1;  // uniform box half-width for initial position
        int t_max = 500;
    };

    PointMassPush() = default;
    explicit PointMassPush(const Params& p) : p_(p) {}

    std::string name() const override { return "point_mass_push"; }
    int state_dim() const override { return 4; }
    int action_dim() const override { return 2; }
    int dist_dim() const override { return 2; }
    int reward_dim() const override { return 2; }
    double action_low() const override { return -1.0; }
    double action_high() const override { return 1.0; }
    double d_max() const override { return p_.d_max; }
    int t_max() const override { return p_.t_max; }

    Array reset(Rng& rng) override;
    StepResult step(const Array& s, const Array& a, const Array& d, int t,
                    Rng& rng) override;

    const Params& params() const { return p_; }

private:
    Params p_;
};

/// Kinematic chain crawling along a line. The 4 head joints are driven by
/// actions, the tail joints by disturbances at half torque authority. Forward
/// progress uses an anisotropic-friction surrogate: each joint's angular
/// velocity is gated by the sign of the next joint's angle, so only
/// travelling-wave gaits rectify into net displacement. Reward is exactly
/// 100 * (per-step displacement).
class ChainCrawler final : public Env {
public:
    struct Params {
        int joints = 6;            // in {6, 7, 8}
        double dt = 0.05;
        double torque_gain = 10.0;
        double damping = 2.0;
        double spring = 5.0;
        double friction_gain = 0.1;
        double joint_limit = 0.5235987755982988;  // 30 degrees
        double tail_authority = 0.5;
        double d_max = 1.0;
        int t_max = 500;
    };

    ChainCrawler() = default;
    explicit ChainCrawler(const Params& p) : p_(p) {}

    std::string name() const override { return "chain_crawler"; }
    int state_dim() const override { return 2 * p_.joints + 1; }
    int action_dim() const override { return 4; }
    int dist_dim() const override { return p_.joints - 4; }
    int reward_dim() const override { return 1; }
    double action_low() const override { return -1.0; }
    double action_high() const override { return 1.0; }
    double d_max() const override { return p_.d_max; }
    int t_max() const override { return p_.t_max; }

    Array reset(Rng& rng) override;
    StepResult step(const Array& s, const Array& a, const Array& d, int t,
                    Rng& rng) override;

    const Params& params() const { return p_; }

private:
    Params p_;
};

/// Factory by config name; throws std::invalid_argument for unknown names.
std::unique_ptr<Env> make_env(const std::string& name, int chain_joints, int t_max);

} // namespace lira::env
