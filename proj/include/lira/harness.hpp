#pragma once

#include "lira/checkpoint.hpp"
#include "lira/config.hpp"
#include "lira/noise.hpp"
#include "lira/stats.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lira::harness {

/// Output directory resolution order: explicit CLI value, config out_dir,
/// $LIRA_OUT_ROOT/<env>_<mode>_seed<seed>, ./runs/<env>_<mode>_seed<seed>.
std::string resolve_out_dir(const config::ExperimentConfig& cfg,
                            const std::string& cli_out);

struct TrainResult {
    std::vector<double> returns;  // one entry per episode
    std::vector<double> gaps;
    std::vector<double> lambdas;
    std::string checkpoint_path;
};

/// Collect/learn alternation for the configured episode count. Writes into
/// out_dir: config.ini (provenance), run_log.csv, score.csv, gap.csv,
/// lambda.csv (all append-only), and checkpoint.txt at the configured
/// interval and on completion.
TrainResult run_training(const config::ExperimentConfig& cfg, const std::string& out_dir);

struct EvalResult {
    std::vector<double> returns;  // one entry per trial
    double iqm = 0.0;
};

/// Evaluation protocol: planner runs on the policy mean (no exploration) and
/// disturbances come from the chosen test noise instead of the adversary.
EvalResult eval_learner(learn::Learner& learner, env::Env& e,
                        const plan::PlannerConfig& pcfg, noise::Kind kind, int trials,
                        uint64_t seed);

/// Checkpoint-driven evaluation; optionally writes per-trial returns CSV.
EvalResult run_eval(const std::string& ckpt_path, noise::Kind kind, int trials,
                    uint64_t seed, const std::string& out_csv);

} // namespace lira::harness
