#include "lira/harness.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace lira::harness {

namespace fs = std::filesystem;
using ad::Array;

std::string resolve_out_dir(const config::ExperimentConfig& cfg,
                            const std::string& cli_out) {
    if (!cli_out.empty()) return cli_out;
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    const char* root = std::getenv("LIRA_OUT_ROOT");
    const std::string base = (root && *root) ? root : "runs";
    return base + "/" + cfg.env + "_" + learn::mode_name(cfg.mode) + "_seed" +
           std::to_string(cfg.seed);
}

TrainResult run_training(const config::ExperimentConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);

    auto e = env::make_env(cfg.env, cfg.chain_joints, cfg.t_max);
    Rng rng(cfg.seed);
    const learn::LearnerConfig lc = cfg.learner_config(
        e->state_dim(), e->action_dim(), e->reward_dim(), e->dist_dim());
    learn::Learner learner(lc, rng);

    {
        std::ofstream prov(out_dir + "/config.ini");
        prov << cfg.serialize();
        if (!prov) throw std::runtime_error("cannot write " + out_dir + "/config.ini");
    }

    std::ofstream log(out_dir + "/run_log.csv");
    std::ofstream score(out_dir + "/score.csv");
    std::ofstream gapf(out_dir + "/gap.csv");
    std::ofstream lamf(out_dir + "/lambda.csv");
    if (!log || !score || !gapf || !lamf)
        throw std::runtime_error("cannot open log files in " + out_dir);
    log << "episode,return,model_nll,aware_nll,gap,lambda,gamma,adv_scale,wall_time\n";
    score << "episode,return\n";
    gapf << "episode,gap\n";
    lamf << "episode,lambda\n";

    TrainResult res;
    res.checkpoint_path = out_dir + "/checkpoint.txt";
    const auto t0 = std::chrono::steady_clock::now();
    char buf[64];

    for (int ep = 0; ep < cfg.episodes; ++ep) {
        const double ret = learner.collect_episode(*e, cfg.planner, rng);
        const learn::EpochDiag diag = learner.train_epoch(rng);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        auto num = [&buf](double v) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            return std::string(buf);
        };
        log << ep << "," << num(ret) << "," << num(diag.loss_m) << ","
            << num(diag.loss_a) << "," << num(diag.gap) << "," << num(diag.lambda_mean)
            << "," << num(diag.gamma) << "," << num(diag.adv_scale) << "," << num(wall)
            << "\n";
        score << ep << "," << num(ret) << "\n";
        gapf << ep << "," << num(diag.gap) << "\n";
        lamf << ep << "," << num(diag.lambda_mean) << "\n";
        log.flush();
        score.flush();
        gapf.flush();
        lamf.flush();

        res.returns.push_back(ret);
        res.gaps.push_back(diag.gap);
        res.lambdas.push_back(diag.lambda_mean);

        const bool at_interval =
            cfg.checkpoint_interval > 0 && (ep + 1) % cfg.checkpoint_interval == 0;
        if (at_interval || ep + 1 == cfg.episodes) {
            const std::string tmp = res.checkpoint_path + ".tmp";
            ckpt::save(tmp, cfg, learner);
            fs::rename(tmp, res.checkpoint_path);
        }
    }
    return res;
}

EvalResult eval_learner(learn::Learner& learner, env::Env& e,
                        const plan::PlannerConfig& pcfg, noise::Kind kind, int trials,
                        uint64_t seed) {
    EvalResult out;
    learn::ModelDynamics dyn(learner.world_model(), e.state_dim(), e.action_dim(),
                             e.reward_dim());
    const double lo = e.action_low();
    const double hi = e.action_high();
    const plan::PlannerPolicy init = plan::initial_policy(pcfg, e.action_dim(), lo, hi);

    noise::NoiseGen::Params np;
    np.kind = kind;
    np.dim = e.dist_dim();
    np.t_max = e.t_max();
    np.d_max = e.d_max();

    Rng base(seed);
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng = base.fork(static_cast<uint64_t>(trial) + 1);
        noise::NoiseGen gen(np);
        gen.reset(rng);

        Array s = e.reset(rng);
        plan::PlannerPolicy prev;
        bool have_prev = false;
        double ret = 0.0;
        int t = 0;
        while (true) {
            plan::PlannerPolicy pol = have_prev ? plan::warm_start(prev, init, pcfg) : init;
            auto pr = plan::plan(s, dyn, std::move(pol), pcfg, lo, hi,
                                 /*explore=*/false, rng);
            prev = std::move(pr.policy);
            have_prev = true;
            const Array d = gen.emit(t, rng);
            auto sr = e.step(s, pr.first_action, d, t, rng);
            ret += sr.r.sum();
            s = sr.s_next;
            ++t;
            if (sr.terminated || sr.truncated) break;
        }
        out.returns.push_back(ret);
    }
    out.iqm = stats::iqm(out.returns);
    return out;
}

EvalResult run_eval(const std::string& ckpt_path, noise::Kind kind, int trials,
                    uint64_t seed, const std::string& out_csv) {
    ckpt::Loaded loaded = ckpt::load(ckpt_path);
    EvalResult out = eval_learner(*loaded.learner, *loaded.environment,
                                  loaded.cfg.planner, kind, trials, seed);
    if (!out_csv.empty()) {
        const fs::path p(out_csv);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        std::ofstream f(out_csv);
        if (!f) throw std::runtime_error("cannot write " + out_csv);
        f << "trial,return\n";
        char buf[64];
        for (size_t i = 0; i < out.returns.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", out.returns[i]);
            f << i << "," << buf << "\n";
        }
    }
    return out;
}

} // namespace lira::harness
