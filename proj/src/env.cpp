#include "lira/env.hpp"

#include <cmath>
#include <stdexcept>

namespace lira::env {

Array PointMassPush::reset(Rng& rng) {
    Array s = Array::vec(4);
    s[0] = p_.reset_radius * (2.0 * rng.uniform() - 1.0);
    s[1] = p_.reset_radius * (2.0 * rng.uniform() - 1.0);
    s[2] = 0.0;
    s[3] = 0.0;
    return s;
}

StepResult PointMassPush::step(const Array& s, const Array& a, const Array& d,
                               int t, Rng&) {
    const double ax = bounded(a[0], -1.0, 1.0);
    const double ay = bounded(a[1], -1.0, 1.0);
    const double dx = bounded(d[0], -p_.d_max, p_.d_max);
    const double dy = bounded(d[1], -p_.d_max, p_.d_max);

    const double fx = ax + p_.dist_gain * dx;
    const double fy = ay + p_.dist_gain * dy;
    const double vx = s[2] + p_.dt * (fx - p_.damping * s[2]) / p_.mass;
    const double vy = s[3] + p_.dt * (fy - p_.damping * s[3]) / p_.mass;
    const double px = s[0] + p_.dt * vx;
    const double py = s[1] + p_.dt * vy;

    StepResult out;
    out.s_next = Array::vec(4);
    out.s_next[0] = px;
    out.s_next[1] = py;
    out.s_next[2] = vx;
    out.s_next[3] = vy;

    const double pnorm = std::sqrt(px * px + py * py);
    out.r = Array::vec(2);
    out.r[0] = 1.0 - std::min(1.0, pnorm / 0.2);
    out.r[1] = 0.1 - 0.1 * (std::abs(ax) + std::abs(ay));

    out.terminated = pnorm > 0.5;
    out.truncated = !out.terminated && (t + 1 >= p_.t_max);
    return out;
}

Array ChainCrawler::reset(Rng& rng) {
    const int n = p_.joints;
    Array s = Array::vec(2 * n + 1);
    for (int j = 0; j < n; ++j) s[j] = 0.05 * (2.0 * rng.uniform() - 1.0);
    return s;  // angular velocities and last displacement start at zero
}

StepResult ChainCrawler::step(const Array& s, const Array& a, const Array& d,
                              int t, Rng&) {
    const int n = p_.joints;
    Array q = Array::vec(n);
    Array w = Array::vec(n);

    for (int j = 0; j < n; ++j) {
        double u;
        if (j < 4) {
            u = bounded(a[j], -1.0, 1.0);
        } else {
            u = p_.tail_authority * bounded(d[j - 4], -p_.d_max, p_.d_max);
        }
        const double tau = p_.torque_gain * u;
        double wj = s[n + j] + p_.dt * (tau - p_.damping * s[n + j] - p_.spring * s[j]);
        double qj = s[j] + p_.dt * wj;
        if (qj > p_.joint_limit) {
            qj = p_.joint_limit;
            wj = 0.0;
        } else if (qj < -p_.joint_limit) {
            qj = -p_.joint_limit;
            wj = 0.0;
        }
        q[j] = qj;
        w[j] = wj;
    }

    // Travelling-wave rectification: joint j's thrust is gated by the sign of
    // the angle of the joint behind it. Gating by the same joint's angle would
    // make per-step displacement an exact differential of q, which integrates
    // to zero over any periodic gait.
    double progress = 0.0;
    for (int j = 0; j + 1 < n; ++j) {
        const double grip = q[j + 1] > 0.0 ? 1.0 : 0.25;
        progress += w[j] * grip;
    }
    const double dx = p_.friction_gain * p_.dt * progress;

    StepResult out;
    out.s_next = Array::vec(2 * n + 1);
    for (int j = 0; j < n; ++j) {
        out.s_next[j] = q[j];
        out.s_next[n + j] = w[j];
    }
    out.s_next[2 * n] = dx;

    out.r = Array::vec(1);
    out.r[0] = 100.0 * dx;
    out.terminated = false;
    out.truncated = (t + 1 >= p_.t_max);
    return out;
}

std::unique_ptr<Env> make_env(const std::string& name, int chain_joints, int t_max) {
    if (name == "point_mass_push") {
        PointMassPush::Params p;
        if (t_max > 0) p.t_max = t_max;
        return std::make_unique<PointMassPush>(p);
    }
    if (name == "chain_crawler") {
        ChainCrawler::Params p;
        if (chain_joints >= 6 && chain_joints <= 8) p.joints = chain_joints;
        if (t_max > 0) p.t_max = t_max;
        return std::make_unique<ChainCrawler>(p);
    }
    throw std::invalid_argument("unknown environment: " + name);
}

} // namespace lira::env
