#include "lira/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lira::config {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out;
}

} // namespace

Ini Ini::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

Ini Ini::parse_string(const std::string& text, const std::string& origin) {
    Ini ini;
    ini.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                            ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            ini.data_[section];
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                        ": empty key");
        ini.data_[section][key] = val;
    }
    return ini;
}

bool Ini::has(const std::string& section, const std::string& key) const {
    auto s = data_.find(section);
    return s != data_.end() && s->second.count(key) > 0;
}

std::string Ini::get(const std::string& section, const std::string& key,
                     const std::string& fallback) const {
    auto s = data_.find(section);
    if (s == data_.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double Ini::get_double(const std::string& section, const std::string& key,
                       double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size())
        throw std::invalid_argument("config field " + section + "." + key +
                                    ": not a number: '" + v + "'");
    return x;
}

int Ini::get_int(const std::string& section, const std::string& key,
                 int fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size())
        throw std::invalid_argument("config field " + section + "." + key +
                                    ": not an integer: '" + v + "'");
    return static_cast<int>(x);
}

bool Ini::get_bool(const std::string& section, const std::string& key,
                   bool fallback) const {
    if (!has(section, key)) return fallback;
    std::string v = get(section, key, "");
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config field " + section + "." + key +
                                ": not a boolean: '" + v + "'");
}

std::vector<int> Ini::get_ints(const std::string& section, const std::string& key,
                               const std::vector<int>& fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    std::vector<int> out;
    std::istringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        size_t pos = 0;
        out.push_back(static_cast<int>(std::stol(item, &pos)));
        if (pos != item.size())
            throw std::invalid_argument("config field " + section + "." + key +
                                        ": not an integer list: '" + v + "'");
    }
    return out;
}

void Ini::validate(const std::map<std::string, std::vector<std::string>>& schema) const {
    for (const auto& [section, kv] : data_) {
        auto s = schema.find(section);
        if (s == schema.end())
            throw std::invalid_argument(origin_ + ": unknown config section [" +
                                        section + "]");
        for (const auto& [key, _] : kv) {
            if (std::find(s->second.begin(), s->second.end(), key) == s->second.end())
                throw std::invalid_argument(origin_ + ": unknown config field " +
                                            section + "." + key);
        }
    }
}

namespace {
const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> s = {
        {"experiment", {"env", "mode", "episodes", "seed", "out_dir"}},
        {"env", {"t_max", "chain_joints"}},
        {"lira",
         {"rho", "eps", "beta", "beta_state", "d_max", "batch_size", "buffer_capacity",
          "lambda_init", "gamma_init", "lr", "lambda_state_dependent", "lambda_fixed"}},
        {"model",
         {"hidden", "flow_layers", "flow_bins", "flow_bound", "tau", "cond_hidden",
          "scale_floor"}},
        {"adversary", {"feature_hidden", "head_hidden", "flow_layers", "flow_bins", "tau"}},
        {"planner",
         {"candidates", "elite_frac", "iterations", "step_size", "inv_temp", "neg_ratio",
          "slowdown", "horizon"}},
        {"eval", {"trials", "checkpoint_interval"}},
    };
    return s;
}
} // namespace

ExperimentConfig ExperimentConfig::from_ini(const Ini& ini) {
    ini.validate(schema());
    ExperimentConfig c;
    c.env = ini.get("experiment", "env", c.env);
    c.mode = learn::parse_mode(ini.get("experiment", "mode", learn::mode_name(c.mode)));
    c.episodes = ini.get_int("experiment", "episodes", c.episodes);
    c.seed = static_cast<uint64_t>(ini.get_int("experiment", "seed", 0));
    c.out_dir = ini.get("experiment", "out_dir", c.out_dir);

    c.t_max = ini.get_int("env", "t_max", c.t_max);
    c.chain_joints = ini.get_int("env", "chain_joints", c.chain_joints);

    c.rho = ini.get_double("lira", "rho", c.rho);
    c.eps = ini.get_double("lira", "eps", c.eps);
    c.beta = ini.get_double("lira", "beta", c.beta);
    c.beta_state = ini.get_double("lira", "beta_state", c.beta_state);
    c.d_max = ini.get_double("lira", "d_max", c.d_max);
    c.batch_size = ini.get_int("lira", "batch_size", c.batch_size);
    c.buffer_capacity = ini.get_int("lira", "buffer_capacity", c.buffer_capacity);
    c.lambda_init = ini.get_double("lira", "lambda_init", c.lambda_init);
    c.gamma_init = ini.get_double("lira", "gamma_init", c.gamma_init);
    c.lr = ini.get_double("lira", "lr", c.lr);
    c.lambda_state_dependent =
        ini.get_bool("lira", "lambda_state_dependent", c.lambda_state_dependent);
    c.lambda_fixed = ini.get_double("lira", "lambda_fixed", c.lambda_fixed);

    c.hidden = ini.get_ints("model", "hidden", c.hidden);
    c.flow_layers = ini.get_int("model", "flow_layers", c.flow_layers);
    c.flow_bins = ini.get_int("model", "flow_bins", c.flow_bins);
    c.flow_bound = ini.get_double("model", "flow_bound", c.flow_bound);
    c.tau = ini.get_double("model", "tau", c.tau);
    c.cond_hidden = ini.get_ints("model", "cond_hidden", c.cond_hidden);
    c.scale_floor = ini.get_double("model", "scale_floor", c.scale_floor);

    c.adv_feature_hidden = ini.get_ints("adversary", "feature_hidden", c.adv_feature_hidden);
    c.adv_head_hidden = ini.get_ints("adversary", "head_hidden", c.adv_head_hidden);
    c.adv_flow_layers = ini.get_int("adversary", "flow_layers", c.adv_flow_layers);
    c.adv_flow_bins = ini.get_int("adversary", "flow_bins", c.adv_flow_bins);
    c.adv_tau = ini.get_double("adversary", "tau", c.adv_tau);

    c.planner.candidates = ini.get_int("planner", "candidates", c.planner.candidates);
    c.planner.elite_frac = ini.get_double("planner", "elite_frac", c.planner.elite_frac);
    c.planner.iterations = ini.get_int("planner", "iterations", c.planner.iterations);
    c.planner.step_size = ini.get_double("planner", "step_size", c.planner.step_size);
    c.planner.inv_temp = ini.get_double("planner", "inv_temp", c.planner.inv_temp);
    c.planner.neg_ratio = ini.get_double("planner", "neg_ratio", c.planner.neg_ratio);
    c.planner.slowdown = ini.get_double("planner", "slowdown", c.planner.slowdown);
    c.planner.horizon = ini.get_int("planner", "horizon", c.planner.horizon);
    if (!c.planner.valid())
        throw std::invalid_argument(
            "config section [planner]: needs candidates >= 8, elite count >= 2, "
            "horizon >= 1");

    c.trials = ini.get_int("eval", "trials", c.trials);
    c.checkpoint_interval = ini.get_int("eval", "checkpoint_interval", c.checkpoint_interval);

    if (c.episodes < 1)
        throw std::invalid_argument("config field experiment.episodes: must be >= 1");
    if (c.batch_size < 1)
        throw std::invalid_argument("config field lira.batch_size: must be >= 1");
    if (c.rho < 0.0)
        throw std::invalid_argument("config field lira.rho: must be >= 0");
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    return from_ini(Ini::parse_file(path));
}

std::string ExperimentConfig::serialize() const {
    std::ostringstream o;
    o << "[experiment]\n";
    o << "env = " << env << "\n";
    o << "mode = " << learn::mode_name(mode) << "\n";
    o << "episodes = " << episodes << "\n";
    o << "seed = " << seed << "\n";
    if (!out_dir.empty()) o << "out_dir = " << out_dir << "\n";
    o << "\n[env]\n";
    o << "t_max = " << t_max << "\n";
    o << "chain_joints = " << chain_joints << "\n";
    o << "\n[lira]\n";
    o << "rho = " << fmt_double(rho) << "\n";
    o << "eps = " << fmt_double(eps) << "\n";
    o << "beta = " << fmt_double(beta) << "\n";
    o << "beta_state = " << fmt_double(beta_state) << "\n";
    o << "d_max = " << fmt_double(d_max) << "\n";
    o << "batch_size = " << batch_size << "\n";
    o << "buffer_capacity = " << buffer_capacity << "\n";
    o << "lambda_init = " << fmt_double(lambda_init) << "\n";
    o << "gamma_init = " << fmt_double(gamma_init) << "\n";
    o << "lr = " << fmt_double(lr) << "\n";
    o << "lambda_state_dependent = " << (lambda_state_dependent ? "true" : "false") << "\n";
    o << "lambda_fixed = " << fmt_double(lambda_fixed) << "\n";
    o << "\n[model]\n";
    o << "hidden = " << join_ints(hidden) << "\n";
    o << "flow_layers = " << flow_layers << "\n";
    o << "flow_bins = " << flow_bins << "\n";
    o << "flow_bound = " << fmt_double(flow_bound) << "\n";
    o << "tau = " << fmt_double(tau) << "\n";
    o << "cond_hidden = " << join_ints(cond_hidden) << "\n";
    o << "scale_floor = " << fmt_double(scale_floor) << "\n";
    o << "\n[adversary]\n";
    o << "feature_hidden = " << join_ints(adv_feature_hidden) << "\n";
    o << "head_hidden = " << join_ints(adv_head_hidden) << "\n";
    o << "flow_layers = " << adv_flow_layers << "\n";
    o << "flow_bins = " << adv_flow_bins << "\n";
    o << "tau = " << fmt_double(adv_tau) << "\n";
    o << "\n[planner]\n";
    o << "candidates = " << planner.candidates << "\n";
    o << "elite_frac = " << fmt_double(planner.elite_frac) << "\n";
    o << "iterations = " << planner.iterations << "\n";
    o << "step_size = " << fmt_double(planner.step_size) << "\n";
    o << "inv_temp = " << fmt_double(planner.inv_temp) << "\n";
    o << "neg_ratio = " << fmt_double(planner.neg_ratio) << "\n";
    o << "slowdown = " << fmt_double(planner.slowdown) << "\n";
    o << "horizon = " << planner.horizon << "\n";
    o << "\n[eval]\n";
    o << "trials = " << trials << "\n";
    o << "checkpoint_interval = " << checkpoint_interval << "\n";
    return o.str();
}

learn::LearnerConfig ExperimentConfig::learner_config(int state_dim, int action_dim,
                                                      int reward_dim, int dist_dim) const {
    learn::LearnerConfig lc;
    lc.mode = mode;
    lc.rho = rho;
    lc.eps = eps;
    lc.beta = beta;
    lc.beta_state = beta_state;
    lc.lambda_state_dependent = lambda_state_dependent;
    lc.lambda_fixed = lambda_fixed;
    lc.lambda_init = lambda_init;
    lc.gamma_init = gamma_init;
    lc.lr = lr;
    lc.batch_size = batch_size;
    lc.buffer_capacity = buffer_capacity;

    lc.model.state_dim = state_dim;
    lc.model.action_dim = action_dim;
    lc.model.reward_dim = reward_dim;
    lc.model.dist_dim = dist_dim;
    lc.model.hidden = hidden;
    lc.model.flow_layers = flow_layers;
    lc.model.flow_bins = flow_bins;
    lc.model.flow_bound = flow_bound;
    lc.model.tau = tau;
    lc.model.cond_hidden = cond_hidden;
    lc.model.scale_floor = scale_floor;
    lc.model.odd_flow = mode != learn::Mode::AblateRNF;

    lc.adversary.state_dim = state_dim;
    lc.adversary.dist_dim = dist_dim;
    lc.adversary.d_max = d_max;
    lc.adversary.flow_layers = adv_flow_layers;
    lc.adversary.flow_bins = adv_flow_bins;
    lc.adversary.tau = adv_tau;
    lc.adversary.feature_hidden = adv_feature_hidden;
    lc.adversary.head_hidden = adv_head_hidden;

    lc.slack_hidden = hidden;
    lc.lambda_hidden = hidden;
    return lc;
}

} // namespace lira::config
