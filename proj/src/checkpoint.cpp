#include "lira/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lira::ckpt {

namespace {

std::vector<ad::Var> all_params(const learn::Learner& l) {
    std::vector<ad::Var> ps = l.theta_params();
    for (const auto& p : l.phi_params()) ps.push_back(p);
    for (const auto& p : l.eta_params()) ps.push_back(p);
    for (const auto& p : l.lambda_net_params()) ps.push_back(p);
    ps.push_back(l.lambda_param());
    ps.push_back(l.gamma_param());
    return ps;
}

} // namespace

void save(const std::string& path, const config::ExperimentConfig& cfg,
          const learn::Learner& learner) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << "lira-checkpoint v1\n";
    out << "config-begin\n" << cfg.serialize() << "config-end\n";
    char buf[40];
    for (const auto& p : all_params(learner)) {
        const ad::Array& v = p.value();
        out << "array " << p.name() << " " << v.rank() << " " << v.rows() << " "
            << v.cols() << "\n";
        for (int i = 0; i < v.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
            out << buf << (i + 1 == v.size() ? "" : " ");
        }
        out << "\n";
    }
    out << "end\n";
    if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

Loaded load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "lira-checkpoint v1")
        throw std::runtime_error("not a checkpoint file: " + path);
    if (!std::getline(in, line) || line != "config-begin")
        throw std::runtime_error("checkpoint missing embedded config: " + path);
    std::ostringstream cfg_text;
    while (std::getline(in, line) && line != "config-end") cfg_text << line << "\n";
    if (line != "config-end")
        throw std::runtime_error("checkpoint config block unterminated: " + path);

    Loaded out;
    out.cfg = config::ExperimentConfig::from_ini(
        config::Ini::parse_string(cfg_text.str(), path + "#config"));
    out.environment = env::make_env(out.cfg.env, out.cfg.chain_joints, out.cfg.t_max);

    Rng rng(out.cfg.seed);
    const learn::LearnerConfig lc = out.cfg.learner_config(
        out.environment->state_dim(), out.environment->action_dim(),
        out.environment->reward_dim(), out.environment->dist_dim());
    out.learner = std::make_unique<learn::Learner>(lc, rng);

    std::map<std::string, ad::Var> by_name;
    for (const auto& p : all_params(*out.learner)) by_name.emplace(p.name(), p);

    size_t restored = 0;
    while (std::getline(in, line)) {
        if (line == "end") break;
        std::istringstream hs(line);
        std::string tag, name;
        int rank = 0, rows = 0, cols = 0;
        hs >> tag >> name >> rank >> rows >> cols;
        if (tag != "array" || hs.fail())
            throw std::runtime_error("garbled checkpoint header line: " + line);
        auto it = by_name.find(name);
        if (it == by_name.end())
            throw std::runtime_error("checkpoint names unknown parameter: " + name);
        ad::Array& v = it->second.node()->value;
        if (v.rank() != rank || v.rows() != rows || v.cols() != cols)
            throw std::runtime_error("checkpoint shape mismatch for " + name);
        if (!std::getline(in, line))
            throw std::runtime_error("checkpoint truncated at " + name);
        std::istringstream vs(line);
        for (int i = 0; i < v.size(); ++i) {
            if (!(vs >> v[i]))
                throw std::runtime_error("checkpoint values truncated for " + name);
        }
        ++restored;
    }
    if (restored != by_name.size())
        throw std::runtime_error("checkpoint restored " + std::to_string(restored) +
                                 " of " + std::to_string(by_name.size()) + " parameters");
    return out;
}

} // namespace lira::ckpt
