#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "helpers.hpp"
#include "lira/planner.hpp"

using namespace lira;
using namespace lira::ad;
using namespace lira::plan;

namespace {

// Deterministic 1-dim integrator: x' = x + a, reward -(x' - 1)^2.
class IntegratorModel final : public DynamicsModel {
public:
    int state_dim() const override { return 1; }
    int action_dim() const override { return 1; }
    int reward_dim() const override { return 1; }
    void predict_mean(const Array& s, const Array& a, Array& s_next,
                      Array& r) const override {
        const int n = s.rows();
        s_next = Array::mat(n, 1);
        r = Array::mat(n, 1);
        for (int i = 0; i < n; ++i) {
            const double x = s.at(i, 0) + a.at(i, 0);
            s_next.at(i, 0) = x;
            r.at(i, 0) = -(x - 1.0) * (x - 1.0);
        }
    }
};

// Hand model: s' = 2s + a, rewards [s + a, 0.25].
class HandLinearModel final : public DynamicsModel {
public:
    int state_dim() const override { return 1; }
    int action_dim() const override { return 1; }
    int reward_dim() const override { return 2; }
    void predict_mean(const Array& s, const Array& a, Array& s_next,
                      Array& r) const override {
        const int n = s.rows();
        s_next = Array::mat(n, 1);
        r = Array::mat(n, 2);
        for (int i = 0; i < n; ++i) {
            s_next.at(i, 0) = 2.0 * s.at(i, 0) + a.at(i, 0);
            r.at(i, 0) = s.at(i, 0) + a.at(i, 0);
            r.at(i, 1) = 0.25;
        }
    }
};

class ZeroRewardModel final : public DynamicsModel {
public:
    int state_dim() const override { return 1; }
    int action_dim() const override { return 1; }
    int reward_dim() const override { return 1; }
    void predict_mean(const Array& s, const Array& a, Array& s_next,
                      Array& r) const override {
        s_next = s;
        r = Array::mat(s.rows(), 1, 0.0);
        (void)a;
    }
};

// Rewards grow with the action but blow up past the cliff at a > 0.5.
class CliffModel final : public DynamicsModel {
public:
    int state_dim() const override { return 1; }
    int action_dim() const override { return 1; }
    int reward_dim() const override { return 1; }
    void predict_mean(const Array& s, const Array& a, Array& s_next,
                      Array& r) const override {
        const int n = s.rows();
        s_next = Array::mat(n, 1);
        r = Array::mat(n, 1);
        for (int i = 0; i < n; ++i) {
            s_next.at(i, 0) = s.at(i, 0);
            r.at(i, 0) = a.at(i, 0) > 0.5
                             ? std::numeric_limits<double>::quiet_NaN()
                             : a.at(i, 0);
        }
    }
};

// Damped integrator used for the improvement property.
class DampedModel final : public DynamicsModel {
public:
    int state_dim() const override { return 1; }
    int action_dim() const override { return 1; }
    int reward_dim() const override { return 1; }
    void predict_mean(const Array& s, const Array& a, Array& s_next,
                      Array& r) const override {
        const int n = s.rows();
        s_next = Array::mat(n, 1);
        r = Array::mat(n, 1);
        for (int i = 0; i < n; ++i) {
            const double x = 0.9 * s.at(i, 0) + a.at(i, 0);
            s_next.at(i, 0) = x;
            r.at(i, 0) = -x * x;
        }
    }
};

bool arrays_equal(const Array& a, const Array& b) {
    if (a.size() != b.size()) return false;
    for (int i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

} // namespace

TEST_SUITE("planner") {

TEST_CASE("config invariants gate degenerate setups") {
    PlannerConfig c;
    CHECK(c.valid());
    c.horizon = 0;
    CHECK(!c.valid());
    c.horizon = 12;
    c.candidates = 4;
    CHECK(!c.valid());
    c.candidates = 8;
    c.elite_frac = 0.25;
    CHECK(c.elite_count() == 2);
    CHECK(c.valid());
}

TEST_CASE("fresh policy is centered with quarter-range scale") {
    PlannerConfig c;
    c.horizon = 5;
    const auto p = initial_policy(c, 2, -1.0, 3.0);
    CHECK(p.mean.rows() == 5);
    CHECK(p.mean.cols() == 2);
    for (int i = 0; i < p.mean.size(); ++i) {
        CHECK(p.mean[i] == 1.0);    // midpoint of [-1, 3]
        CHECK(p.scale[i] == 1.0);   // quarter of the range
        CHECK(p.vel[i] == 0.0);
    }
}

TEST_CASE("warm start shifts, repeats the tail, and blends by step size") {
    PlannerConfig c;
    c.horizon = 3;
    auto init = initial_policy(c, 1, -1.0, 1.0);  // mean 0, scale 0.5
    PlannerPolicy prev = init;
    prev.mean.at(0, 0) = 1.0;
    prev.mean.at(1, 0) = 2.0;
    prev.mean.at(2, 0) = 3.0;
    for (int i = 0; i < 3; ++i) prev.scale.at(i, 0) = 0.3;
    for (int i = 0; i < 3; ++i) prev.vel.at(i, 0) = 9.0;

    c.step_size = 0.0;
    auto w0 = warm_start(prev, init, c);
    CHECK(arrays_equal(w0.mean, init.mean));
    CHECK(arrays_equal(w0.scale, init.scale));

    c.step_size = 1.0;
    auto w1 = warm_start(prev, init, c);
    CHECK(w1.mean.at(0, 0) == 2.0);
    CHECK(w1.mean.at(1, 0) == 3.0);
    CHECK(w1.mean.at(2, 0) == 3.0);  // last row repeated
    for (int i = 0; i < 3; ++i) CHECK(w1.scale.at(i, 0) == 0.3);

    c.step_size = 0.25;
    auto wq = warm_start(prev, init, c);
    CHECK(wq.mean.at(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(wq.mean.at(1, 0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(wq.mean.at(2, 0) == doctest::Approx(0.75).epsilon(1e-15));
    for (int i = 0; i < 3; ++i) CHECK(wq.vel.at(i, 0) == 0.0);  // momentum reset

    // Scalar blend example: shifted previous mean 4, fresh mean 0 -> 1.
    PlannerConfig c1;
    c1.horizon = 1;
    c1.step_size = 0.25;
    auto i1 = initial_policy(c1, 1, -8.0, 8.0);
    PlannerPolicy p1 = i1;
    p1.mean.at(0, 0) = 4.0;
    auto b = warm_start(p1, i1, c1);
    CHECK(b.mean.at(0, 0) == 1.0);
}

TEST_CASE("rollout return matches hand arithmetic") {
    {
        HandLinearModel m;
        const Array s0 = Array::from({1.0});
        Array acts = Array::mat(2, 1);
        acts.at(0, 0) = 0.5;
        acts.at(1, 0) = -1.0;
        // step 1: r = (1 + 0.5) + 0.25; s' = 2.5
        // step 2: r = (2.5 - 1) + 0.25
        CHECK(rollout_return(m, s0, acts) == doctest::Approx(3.5).epsilon(1e-15));
    }
    {
        ZeroRewardModel m;
        const Array s0 = Array::from({0.3});
        CHECK(rollout_return(m, s0, Array::mat(6, 1, 0.7)) == 0.0);
    }
    {
        CliffModel m;
        const Array s0 = Array::from({0.0});
        Array acts = Array::mat(2, 1, 0.9);  // over the cliff: non-finite reward
        CHECK(rollout_return(m, s0, acts) ==
              -std::numeric_limits<double>::infinity());
    }
}

TEST_CASE("planned first action matches exhaustive grid search") {
    IntegratorModel model;
    const double lo = -1.0, hi = 1.0;

    // Brute force over 21^3 action sequences.
    const int g = 21;
    double best_ret = -1e300, best_first = 0.0;
    Array acts = Array::mat(3, 1);
    const Array s0 = Array::from({0.0});
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
            for (int k = 0; k < g; ++k) {
                acts.at(0, 0) = lo + (hi - lo) * i / (g - 1.0);
                acts.at(1, 0) = lo + (hi - lo) * j / (g - 1.0);
                acts.at(2, 0) = lo + (hi - lo) * k / (g - 1.0);
                const double r = rollout_return(model, s0, acts);
                if (r > best_ret) {
                    best_ret = r;
                    best_first = acts.at(0, 0);
                }
            }
    CHECK(best_first == doctest::Approx(1.0));  // drive straight to the target

    PlannerConfig cfg;
    cfg.candidates = 128;
    cfg.horizon = 3;
    cfg.iterations = 6;
    for (int seed = 0; seed < 5; ++seed) {
        Rng rng(1000 + seed);
        const auto pr = plan::plan(s0, model, initial_policy(cfg, 1, lo, hi), cfg, lo, hi,
                             /*explore=*/false, rng);
        CHECK(std::abs(pr.first_action[0] - best_first) <= 0.1 * (hi - lo));
        CHECK(pr.mean_return >= best_ret - 0.05);
    }
}

TEST_CASE("zero step size leaves the policy untouched") {
    IntegratorModel model;
    PlannerConfig cfg;
    cfg.candidates = 32;
    cfg.horizon = 3;
    cfg.step_size = 0.0;
    const Array s0 = Array::from({0.2});
    const auto init = initial_policy(cfg, 1, -1.0, 1.0);
    Rng rng(4);
    const auto pr = plan::plan(s0, model, init, cfg, -1.0, 1.0, false, rng);
    CHECK(arrays_equal(pr.policy.mean, init.mean));
    CHECK(arrays_equal(pr.policy.scale, init.scale));
    CHECK(pr.first_action[0] == init.mean.at(0, 0));
}

TEST_CASE("all-equal returns degrade to uniform weights without blowup") {
    ZeroRewardModel model;
    PlannerConfig cfg;
    cfg.candidates = 16;
    cfg.horizon = 2;
    Rng rng(9);
    const auto pr = plan::plan(Array::from({0.0}), model, initial_policy(cfg, 1, -1.0, 1.0),
                         cfg, -1.0, 1.0, false, rng);
    CHECK(std::isfinite(pr.first_action[0]));
    CHECK(pr.policy.scale.at(0, 0) >= 1e-2 * 2.0);  // scale floor holds
    CHECK(pr.mean_return == 0.0);
}

TEST_CASE("non-finite rollouts are never selected") {
    CliffModel model;
    PlannerConfig cfg;
    cfg.candidates = 64;
    cfg.horizon = 2;
    cfg.iterations = 5;
    Rng rng(11);
    const auto pr = plan::plan(Array::from({0.0}), model, initial_policy(cfg, 1, -1.0, 1.0),
                         cfg, -1.0, 1.0, false, rng);
    // The mean settles inside the finite region below the cliff.
    CHECK(std::isfinite(pr.mean_return));
    CHECK(pr.first_action[0] <= 0.5);
    CHECK(pr.first_action[0] > 0.0);  // still climbs toward the cliff edge
}

TEST_CASE("refinement improves on the initial policy in 95 of 100 trials") {
    DampedModel model;
    PlannerConfig cfg;
    cfg.candidates = 64;
    cfg.horizon = 4;
    int improved = 0;
    for (int seed = 0; seed < 100; ++seed) {
        Rng rng(2000 + seed);
        Array s0 = Array::from({rng.uniform(-2.0, 2.0)});
        const auto init = initial_policy(cfg, 1, -1.0, 1.0);
        const double before = rollout_return(model, s0, init.mean);
        const auto pr = plan::plan(s0, model, init, cfg, -1.0, 1.0, false, rng);
        if (pr.mean_return >= before) ++improved;
    }
    CHECK(improved >= 95);
}

TEST_CASE("identical seeds produce identical plans") {
    IntegratorModel model;
    PlannerConfig cfg;
    cfg.candidates = 32;
    cfg.horizon = 3;
    const Array s0 = Array::from({-0.4});
    Rng r1(77), r2(77);
    const auto p1 = plan::plan(s0, model, initial_policy(cfg, 1, -1.0, 1.0), cfg, -1.0, 1.0,
                         true, r1);
    const auto p2 = plan::plan(s0, model, initial_policy(cfg, 1, -1.0, 1.0), cfg, -1.0, 1.0,
                         true, r2);
    CHECK(arrays_equal(p1.first_action, p2.first_action));
    CHECK(arrays_equal(p1.policy.mean, p2.policy.mean));
    CHECK(arrays_equal(p1.policy.scale, p2.policy.scale));
    CHECK(p1.mean_return == p2.mean_return);
}

} // TEST_SUITE
