#include "doctest.h"

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "lira/env.hpp"
#include "lira/noise.hpp"

using namespace lira;
using namespace lira::ad;

namespace {

double lag1_autocorr(const std::vector<double>& v) {
    const size_t n = v.size();
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (size_t t = 0; t < n; ++t) {
        den += (v[t] - mean) * (v[t] - mean);
        if (t + 1 < n) num += (v[t] - mean) * (v[t + 1] - mean);
    }
    return num / den;
}

// Mediocre stabilizing controller used for the sensitivity ordering.
Array pd_action(const Array& s) {
    Array a = Array::vec(2);
    a[0] = std::clamp(-2.0 * s[0] - s[2], -1.0, 1.0);
    a[1] = std::clamp(-2.0 * s[1] - s[3], -1.0, 1.0);
    return a;
}

double noisy_episode_return(env::Env& e, noise::Kind kind, unsigned long seed) {
    noise::NoiseGen::Params np;
    np.kind = kind;
    np.dim = e.dist_dim();
    np.t_max = e.t_max();
    np.d_max = e.d_max();
    noise::NoiseGen gen(np);
    Rng rng(seed);
    gen.reset(rng);
    Array s = e.reset(rng);
    double ret = 0.0;
    int t = 0;
    while (true) {
        const Array d = gen.emit(t, rng);
        auto sr = e.step(s, pd_action(s), d, t, rng);
        ret += sr.r.sum();
        s = sr.s_next;
        ++t;
        if (sr.terminated || sr.truncated) break;
    }
    return ret;
}

} // namespace

TEST_SUITE("envs") {

TEST_CASE("point mass fixed point yields the maximal reward") {
    env::PointMassPush e;
    Rng rng(1);
    const Array s = Array::vec(4, 0.0);
    const Array a = Array::vec(2, 0.0);
    const Array d = Array::vec(2, 0.0);
    auto out = e.step(s, a, d, 0, rng);
    for (int i = 0; i < 4; ++i) CHECK(out.s_next[i] == 0.0);
    CHECK(out.r[0] == 1.0);
    CHECK(out.r[1] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(!out.terminated);
    CHECK(e.clamp_events() == 0);
}

TEST_CASE("constant push matches the damped-integrator closed form") {
    env::PointMassPush e;
    const auto& p = e.params();
    Rng rng(2);
    Array s = Array::vec(4, 0.0);
    const Array a = Array::vec(2, 0.0);
    Array d = Array::vec(2, 0.0);
    d[0] = p.d_max;

    const int T = 20;
    for (int t = 0; t < T; ++t) s = e.step(s, a, d, t, rng).s_next;

    // v_{t+1} = alpha v_t + b with alpha = 1 - dt*c/m, b = dt*f/m;
    // positions integrate the geometric series (semi-implicit Euler).
    const double alpha = 1.0 - p.dt * p.damping / p.mass;
    const double b = p.dt * p.dist_gain * p.d_max / p.mass;
    const double vinf = b / (1.0 - alpha);
    const double vT = vinf * (1.0 - std::pow(alpha, T));
    // p_T = dt * sum_{t=1..T} v_t
    const double sum_v = vinf * (T - alpha * (1.0 - std::pow(alpha, T)) / (1.0 - alpha));
    const double pT = p.dt * sum_v;

    CHECK(s[0] == doctest::Approx(pT).epsilon(1e-9));
    CHECK(s[2] == doctest::Approx(vT).epsilon(1e-9));
    CHECK(s[1] == 0.0);
    CHECK(s[3] == 0.0);
}

TEST_CASE("point mass terminates on escape and truncates at the horizon") {
    env::PointMassPush::Params prm;
    prm.t_max = 3;
    env::PointMassPush e(prm);
    Rng rng(3);

    Array far = Array::vec(4, 0.0);
    far[0] = 0.49;
    far[2] = 2.0;  // fast outward: next position passes 0.5
    auto out = e.step(far, Array::vec(2, 0.0), Array::vec(2, 0.0), 0, rng);
    CHECK(out.terminated);
    CHECK(!out.truncated);

    const Array origin = Array::vec(4, 0.0);
    auto out2 = e.step(origin, Array::vec(2, 0.0), Array::vec(2, 0.0), 2, rng);
    CHECK(!out2.terminated);
    CHECK(out2.truncated);
}

TEST_CASE("out-of-bounds inputs are clamped and counted") {
    env::PointMassPush e;
    Rng rng(4);
    Array a = Array::vec(2);
    a[0] = 5.0;
    a[1] = -3.0;
    Array d = Array::vec(2);
    d[0] = 2.0;
    d[1] = 0.0;
    auto out = e.step(Array::vec(4, 0.0), a, d, 0, rng);
    CHECK(e.clamp_events() == 3);
    // Clamped force: ax=1, ay=-1, dx gain 0.5 -> fx = 1.5, fy = -1.
    CHECK(out.s_next[2] == doctest::Approx(e.params().dt * 1.5).epsilon(1e-15));
    CHECK(out.s_next[3] == doctest::Approx(-e.params().dt).epsilon(1e-15));
}

TEST_CASE("episodes are bit-reproducible under a fixed seed") {
    for (const char* name : {"point_mass_push", "chain_crawler"}) {
        auto e1 = env::make_env(name, 6, 50);
        auto e2 = env::make_env(name, 6, 50);
        Rng r1(99), r2(99);
        Array s1 = e1->reset(r1), s2 = e2->reset(r2);
        for (int t = 0; t < 50; ++t) {
            Array a = Array::vec(e1->action_dim());
            for (int j = 0; j < a.size(); ++j) a[j] = std::sin(0.3 * t + j);
            Array d = Array::vec(e1->dist_dim(), 0.01 * t);
            auto o1 = e1->step(s1, a, d, t, r1);
            auto o2 = e2->step(s2, a, d, t, r2);
            for (int j = 0; j < o1.s_next.size(); ++j)
                REQUIRE(o1.s_next[j] == o2.s_next[j]);
            REQUIRE(o1.r.sum() == o2.r.sum());
            s1 = o1.s_next;
            s2 = o2.s_next;
        }
    }
}

TEST_CASE("frozen chain makes no progress") {
    env::ChainCrawler e;
    Rng rng(5);
    const Array s = Array::vec(e.state_dim(), 0.0);
    auto out = e.step(s, Array::vec(4, 0.0), Array::vec(2, 0.0), 0, rng);
    CHECK(out.r[0] == 0.0);
    for (int i = 0; i < out.s_next.size(); ++i) CHECK(out.s_next[i] == 0.0);
}

TEST_CASE("chain reward is exactly one hundred times the displacement") {
    env::ChainCrawler e;
    Rng rng(6);
    Array s = e.reset(rng);
    for (int t = 0; t < 30; ++t) {
        Array a = Array::vec(4);
        for (int j = 0; j < 4; ++j) a[j] = rng.uniform(-1.0, 1.0);
        Array d = Array::vec(2);
        for (int j = 0; j < 2; ++j) d[j] = rng.uniform(-1.0, 1.0);
        auto out = e.step(s, a, d, t, rng);
        REQUIRE(out.r[0] == 100.0 * out.s_next[2 * e.params().joints]);
        s = out.s_next;
    }
}

TEST_CASE("travelling-wave gait crawls forward, joint limits hold") {
    env::ChainCrawler e;
    Rng rng(7);
    Array s = Array::vec(e.state_dim(), 0.0);
    double total = 0.0;
    const double limit = e.params().joint_limit;
    for (int t = 0; t < 400; ++t) {
        Array a = Array::vec(4);
        for (int j = 0; j < 4; ++j)
            a[j] = std::sin(2.0 * M_PI * 0.5 * 0.05 * t + 0.9 * j);
        auto out = e.step(s, a, Array::vec(2, 0.0), t, rng);
        total += out.r[0];
        for (int j = 0; j < e.params().joints; ++j)
            REQUIRE(std::abs(out.s_next[j]) <= limit);
        s = out.s_next;
    }
    CHECK(total > 10.0);
}

TEST_CASE("tail joints respond to disturbances at half authority") {
    env::ChainCrawler e;
    Rng rng(8);
    const Array s = Array::vec(e.state_dim(), 0.0);
    Array a = Array::vec(4, 0.0);
    Array d = Array::vec(2, 0.0);
    d[0] = 1.0;
    auto out = e.step(s, a, d, 0, rng);
    // Joint 4 receives tail_authority * torque_gain * d.
    const auto& p = e.params();
    const double w = p.dt * p.tail_authority * p.torque_gain;
    CHECK(out.s_next[p.joints + 4] == doctest::Approx(w).epsilon(1e-15));
    CHECK(out.s_next[p.joints + 5] == 0.0);
}

TEST_CASE("environment factory validates names and joint counts") {
    CHECK_THROWS_AS((void)env::make_env("no_such_env", 6, 100), std::invalid_argument);
    auto e7 = env::make_env("chain_crawler", 7, 100);
    CHECK(e7->state_dim() == 15);
    CHECK(e7->dist_dim() == 3);
    auto e_bad = env::make_env("chain_crawler", 12, 100);  // out of range: default 6
    CHECK(e_bad->dist_dim() == 2);
    auto pm = env::make_env("point_mass_push", 0, 77);
    CHECK(pm->t_max() == 77);
}

TEST_CASE("nominal noise is a clipped gaussian at the prior scale") {
    noise::NoiseGen::Params np;
    np.kind = noise::Kind::Nominal;
    np.dim = 1;
    noise::NoiseGen gen(np);
    Rng rng(11);
    gen.reset(rng);

    const int n = 1000000;
    std::vector<double> xs(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) xs[static_cast<size_t>(i)] = gen.emit(i, rng)[0];
    const double m = lira::test::mean_of(xs);
    const double sd = lira::test::stddev_of(xs);
    CHECK(sd == doctest::Approx(0.2 / 3.0).epsilon(0.01));
    CHECK(std::abs(m) <= 3.0 * sd / std::sqrt(double(n)));

    // Clipping: with a tiny box every draw is still inside it.
    noise::NoiseGen::Params tight = np;
    tight.d_max = 0.01;
    noise::NoiseGen tg(tight);
    for (int i = 0; i < 20000; ++i) {
        const Array d = tg.emit(i, rng);
        REQUIRE(std::abs(d[0]) <= 0.01);
    }
}

TEST_CASE("brownian mixture hits the target scale exactly") {
    for (const auto kind : {noise::Kind::Brown3, noise::Kind::Brown6}) {
        noise::NoiseGen::Params np;
        np.kind = kind;
        np.dim = 2;
        np.t_max = 500;
        noise::NoiseGen gen(np);
        Rng rng(13);
        gen.reset(rng);
        const double target = noise::NoiseGen::scale_factor(kind) * np.sigma0;
        for (int c = 0; c < np.dim; ++c) {
            std::vector<double> raw(static_cast<size_t>(np.t_max));
            for (int t = 0; t < np.t_max; ++t) raw[static_cast<size_t>(t)] = gen.raw(t, c);
            CHECK(lira::test::stddev_of(raw) == doctest::Approx(target).epsilon(1e-12));
        }
        // Emitted values stay in the box even when raw exceeds it.
        for (int t = 0; t < np.t_max; ++t) {
            const Array d = gen.emit(t, rng);
            for (int c = 0; c < np.dim; ++c) REQUIRE(std::abs(d[c]) <= np.d_max);
        }
    }
}

TEST_CASE("single-path mixture degenerates to one rescaled walk") {
    noise::NoiseGen::Params np;
    np.kind = noise::Kind::Brown3;
    np.dim = 1;
    np.t_max = 200;
    np.mixture_paths = 1;
    noise::NoiseGen gen(np);
    Rng rng(17);
    gen.reset(rng);
    // Replay the generator's own stream: first path = signal, second = logits.
    Rng replay(17);
    std::vector<double> walk(200);
    double acc = 0.0;
    for (int t = 0; t < 200; ++t) {
        acc += replay.normal();
        walk[static_cast<size_t>(t)] = acc;
    }
    const double sd = lira::test::stddev_of(walk);
    const double gain = 3.0 * np.sigma0 / sd;
    for (int t = 0; t < 200; ++t)
        REQUIRE(gen.raw(t, 0) == doctest::Approx(gain * walk[static_cast<size_t>(t)])
                                     .epsilon(1e-12));
}

TEST_CASE("brownian noise is dominated by low frequencies") {
    double acc = 0.0;
    for (int seed = 0; seed < 100; ++seed) {
        noise::NoiseGen::Params np;
        np.kind = noise::Kind::Brown3;
        np.dim = 1;
        np.t_max = 500;
        noise::NoiseGen gen(np);
        Rng rng(3000 + seed);
        gen.reset(rng);
        std::vector<double> raw(500);
        for (int t = 0; t < 500; ++t) raw[static_cast<size_t>(t)] = gen.raw(t, 0);
        acc += lag1_autocorr(raw);
    }
    CHECK(acc / 100.0 > 0.9);
}

TEST_CASE("noise generation is reproducible and kinds parse both ways") {
    noise::NoiseGen::Params np;
    np.kind = noise::Kind::Brown6;
    np.dim = 1;
    np.t_max = 300;
    noise::NoiseGen g1(np), g2(np);
    Rng r1(21), r2(21);
    g1.reset(r1);
    g2.reset(r2);
    for (int t = 0; t < 300; ++t) REQUIRE(g1.raw(t, 0) == g2.raw(t, 0));

    CHECK(noise::parse_kind("nominal") == noise::Kind::Nominal);
    CHECK(noise::parse_kind("brown3") == noise::Kind::Brown3);
    CHECK(noise::parse_kind("brown6") == noise::Kind::Brown6);
    CHECK(noise::kind_name(noise::Kind::Brown3) == "brown3");
    CHECK_THROWS_AS(noise::parse_kind("pink"), std::invalid_argument);
}

TEST_CASE("disturbance severity degrades a fixed controller monotonically") {
    env::PointMassPush::Params prm;
    prm.t_max = 200;
    const int trials = 30;
    double mean_ret[3] = {0.0, 0.0, 0.0};
    const noise::Kind kinds[3] = {noise::Kind::Nominal, noise::Kind::Brown3,
                                  noise::Kind::Brown6};
    for (int k = 0; k < 3; ++k) {
        for (int trial = 0; trial < trials; ++trial) {
            env::PointMassPush e(prm);
            mean_ret[k] +=
                noisy_episode_return(e, kinds[k], 4000 + 97 * trial + k);
        }
        mean_ret[k] /= trials;
    }
    INFO("nominal " << mean_ret[0] << " brown3 " << mean_ret[1] << " brown6 "
                    << mean_ret[2]);
    CHECK(mean_ret[0] > mean_ret[1]);
    CHECK(mean_ret[1] > mean_ret[2]);
}

} // TEST_SUITE
