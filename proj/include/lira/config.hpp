#pragma once

#include "lira/learner.hpp"
#include "lira/planner.hpp"

#include <map>
#include <string>
#include <vector>

namespace lira::config {

/// Sectioned key-value text ("[section]\nkey = value"); '#' and ';' start
/// comments. Parsing is strict: unknown sections or keys are reported with
/// their location so config typos fail fast.
class Ini {
public:
    static Ini parse_file(const std::string& path);
    static Ini parse_string(const std::string& text, const std::string& origin);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key,
                      double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool(const std::string& section, const std::string& key,
                  bool fallback) const;
    std::vector<int> get_ints(const std::string& section, const std::string& key,
                              const std::vector<int>& fallback) const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return data_;
    }

    /// Throws std::invalid_argument naming the first key outside the allowed
    /// schema ("section.key").
    void validate(const std::map<std::string, std::vector<std::string>>& schema) const;

private:
    std::map<std::string, std::map<std::string, std::string>> data_;
    std::string origin_;
};

/// Full experiment description; defaults mirror the published settings where
/// they exist. Everything is round-trippable through `serialize`.
struct ExperimentConfig {
    // [experiment]
    std::string env = "point_mass_push";
    learn::Mode mode = learn::Mode::Proposal;
    int episodes = 200;
    uint64_t seed = 0;
    std::string out_dir;  // empty: resolved from LIRA_OUT_ROOT

    // [env]
    int t_max = 0;  // 0: environment default
    int chain_joints = 6;

    // [lira]
    double rho = 1.5;
    double eps = 0.1;
    double beta = 1e-3;
    double beta_state = 5e-3;
    double d_max = 1.0;
    int batch_size = 32;
    int buffer_capacity = 102400;
    double lambda_init = 0.5;
    double gamma_init = 0.01;
    double lr = 1e-3;
    bool lambda_state_dependent = false;
    double lambda_fixed = -1.0;

    // [model]
    std::vector<int> hidden{100, 100};
    int flow_layers = 2;
    int flow_bins = 8;
    double flow_bound = 5.0;
    double tau = 0.99;
    std::vector<int> cond_hidden{32, 32};
    double scale_floor = 1e-3;

    // [adversary]
    std::vector<int> adv_feature_hidden{100, 100};
    std::vector<int> adv_head_hidden{32, 32};
    int adv_flow_layers = 2;
    int adv_flow_bins = 8;
    double adv_tau = 0.99;

    // [planner]
    plan::PlannerConfig planner;

    // [eval]
    int trials = 30;
    int checkpoint_interval = 50;

    static ExperimentConfig from_ini(const Ini& ini);
    static ExperimentConfig load(const std::string& path);
    std::string serialize() const;

    /// Learner wiring for an environment's dimensions.
    learn::LearnerConfig learner_config(int state_dim, int action_dim, int reward_dim,
                                        int dist_dim) const;
};

} // namespace lira::config
