#include "lira/planner.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

namespace lira::plan {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
} // namespace

PlannerPolicy initial_policy(const PlannerConfig& cfg, int action_dim, double a_lo,
                             double a_hi) {
    PlannerPolicy p;
    const double mid = 0.5 * (a_lo + a_hi);
    const double span = a_hi - a_lo;
    p.mean = Array::mat(cfg.horizon, action_dim, mid);
    p.scale = Array::mat(cfg.horizon, action_dim, 0.25 * span);
    p.vel = Array::mat(cfg.horizon, action_dim, 0.0);
    return p;
}

PlannerPolicy warm_start(const PlannerPolicy& prev, const PlannerPolicy& init,
                         const PlannerConfig& cfg) {
    const int h = init.mean.rows();
    const int adim = init.mean.cols();
    PlannerPolicy out;
    out.mean = Array::mat(h, adim);
    out.scale = Array::mat(h, adim);
    out.vel = Array::mat(h, adim, 0.0);
    const double w = cfg.step_size;
    for (int t = 0; t < h; ++t) {
        const int src = std::min(t + 1, h - 1);  // shift by one, repeat last
        for (int j = 0; j < adim; ++j) {
            out.mean.at(t, j) = (1.0 - w) * init.mean.at(t, j) + w * prev.mean.at(src, j);
            out.scale.at(t, j) = (1.0 - w) * init.scale.at(t, j) + w * prev.scale.at(src, j);
        }
    }
    return out;
}

double rollout_return(const DynamicsModel& model, const Array& s0, const Array& actions) {
    const int h = actions.rows();
    Array s = s0.reshaped(2, 1, s0.size());
    double ret = 0.0;
    for (int t = 0; t < h; ++t) {
        Array a = Array::mat(1, actions.cols());
        for (int j = 0; j < actions.cols(); ++j) a[j] = actions.at(t, j);
        Array s_next, r;
        model.predict_mean(s, a, s_next, r);
        if (!s_next.all_finite() || !r.all_finite()) return kNegInf;
        ret += r.sum();
        s = s_next;
    }
    return ret;
}

PlanResult plan(const Array& s0, const DynamicsModel& model, PlannerPolicy policy,
                const PlannerConfig& cfg, double a_lo, double a_hi, bool explore,
                Rng& rng) {
    assert(cfg.valid());
    const int nc = cfg.candidates;
    const int h = cfg.horizon;
    const int adim = model.action_dim();
    const int sd = model.state_dim();
    const double scale_floor = 1e-2 * (a_hi - a_lo);

    // Candidate actions stored per step as [nc, adim] blocks for batched rollouts.
    std::vector<Array> acts(static_cast<size_t>(h));
    std::vector<double> returns(static_cast<size_t>(nc));
    std::vector<int> order(static_cast<size_t>(nc));

    for (int it = 0; it < cfg.iterations; ++it) {
        // Sample candidates (candidate-major draw order for reproducibility).
        for (int t = 0; t < h; ++t) acts[static_cast<size_t>(t)] = Array::mat(nc, adim);
        for (int c = 0; c < nc; ++c)
            for (int t = 0; t < h; ++t)
                for (int j = 0; j < adim; ++j) {
                    const double v = policy.mean.at(t, j) +
                                     policy.scale.at(t, j) * rng.normal();
                    acts[static_cast<size_t>(t)].at(c, j) = std::clamp(v, a_lo, a_hi);
                }

        // Batched rollout of all candidates against the mean predictions.
        Array s = Array::mat(nc, sd);
        for (int c = 0; c < nc; ++c)
            for (int j = 0; j < sd; ++j) s.at(c, j) = s0[j];
        std::fill(returns.begin(), returns.end(), 0.0);
        std::vector<char> dead(static_cast<size_t>(nc), 0);
        for (int t = 0; t < h; ++t) {
            Array s_next, r;
            model.predict_mean(s, acts[static_cast<size_t>(t)], s_next, r);
            for (int c = 0; c < nc; ++c) {
                if (dead[static_cast<size_t>(c)]) continue;
                bool ok = true;
                for (int j = 0; j < sd; ++j)
                    if (!std::isfinite(s_next.at(c, j))) ok = false;
                double rc = 0.0;
                for (int j = 0; j < r.cols(); ++j) {
                    rc += r.at(c, j);
                    if (!std::isfinite(r.at(c, j))) ok = false;
                }
                if (!ok) {
                    dead[static_cast<size_t>(c)] = 1;
                    returns[static_cast<size_t>(c)] = kNegInf;
                    for (int j = 0; j < sd; ++j) s_next.at(c, j) = 0.0;  // keep batch finite
                } else {
                    returns[static_cast<size_t>(c)] += rc;
                }
            }
            s = s_next;
        }

        // Elite selection: stable order by (return desc, index asc).
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int x, int y) {
            if (returns[static_cast<size_t>(x)] != returns[static_cast<size_t>(y)])
                return returns[static_cast<size_t>(x)] > returns[static_cast<size_t>(y)];
            return x < y;
        });
        const int ne = cfg.elite_count();
        const double rbest = returns[static_cast<size_t>(order[0])];
        if (!std::isfinite(rbest)) continue;  // every candidate failed: keep policy

        // Softmax weights over elites, shifted by the best return.
        std::vector<double> w(static_cast<size_t>(ne));
        double wsum = 0.0;
        for (int e = 0; e < ne; ++e) {
            const double rc = returns[static_cast<size_t>(order[static_cast<size_t>(e)])];
            w[static_cast<size_t>(e)] = std::isfinite(rc)
                ? std::exp(cfg.inv_temp * (rc - rbest)) : 0.0;
            wsum += w[static_cast<size_t>(e)];
        }
        for (double& x : w) x /= wsum;

        // Weighted stats and accelerated update.
        for (int t = 0; t < h; ++t) {
            const Array& at = acts[static_cast<size_t>(t)];
            for (int j = 0; j < adim; ++j) {
                double wm = 0.0;
                for (int e = 0; e < ne; ++e)
                    wm += w[static_cast<size_t>(e)] * at.at(order[static_cast<size_t>(e)], j);
                double wv = 0.0;
                for (int e = 0; e < ne; ++e) {
                    const double dv = at.at(order[static_cast<size_t>(e)], j) - wm;
                    wv += w[static_cast<size_t>(e)] * dv * dv;
                }
                const double wsd = std::sqrt(wv);
                policy.vel.at(t, j) = cfg.slowdown * policy.vel.at(t, j) +
                                      cfg.step_size * (wm - policy.mean.at(t, j));
                policy.mean.at(t, j) =
                    std::clamp(policy.mean.at(t, j) + policy.vel.at(t, j), a_lo, a_hi);
                policy.scale.at(t, j) = std::max(
                    scale_floor, policy.scale.at(t, j) +
                                     cfg.step_size * (wsd - policy.scale.at(t, j)));
            }
        }
    }

    PlanResult res;
    res.first_action = Array::vec(adim);
    for (int j = 0; j < adim; ++j) {
        double v = policy.mean.at(0, j);
        if (explore) v += policy.scale.at(0, j) * rng.normal();
        res.first_action[j] = std::clamp(v, a_lo, a_hi);
    }
    res.mean_return = rollout_return(model, s0, policy.mean);
    res.policy = std::move(policy);
    return res;
}

} // namespace lira::plan
