#pragma once

#include "lira/config.hpp"
#include "lira/learner.hpp"

#include <string>

namespace lira::ckpt {

/// Self-contained textual checkpoint: the experiment config is embedded so a
/// checkpoint alone suffices to rebuild the learner for evaluation, followed
/// by every named parameter array at full precision.
void save(const std::string& path, const config::ExperimentConfig& cfg,
          const learn::Learner& learner);

struct Loaded {
    config::ExperimentConfig cfg;
    std::unique_ptr<learn::Learner> learner;
    std::unique_ptr<env::Env> environment;
};

/// Rebuilds env + learner from the embedded config and restores parameters.
/// Throws std::runtime_error on missing/garbled files or name mismatches.
Loaded load(const std::string& path);

} // namespace lira::ckpt
