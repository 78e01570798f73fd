#include "lira/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

int cmd_train(const std::string& cfg_path, long long seed, const std::string& out,
              int episodes) {
    lira::config::ExperimentConfig cfg = lira::config::ExperimentConfig::load(cfg_path);
    if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
    if (episodes > 0) cfg.episodes = episodes;
    const std::string out_dir = lira::harness::resolve_out_dir(cfg, out);
    const auto res = lira::harness::run_training(cfg, out_dir);
    const double last = res.returns.empty() ? 0.0 : res.returns.back();
    std::cout << "trained " << res.returns.size() << " episodes; last return " << last
              << "; checkpoint " << res.checkpoint_path << "\n";
    return 0;
}

int cmd_eval(const std::string& model, const std::string& disturbance, int trials,
             long long seed, const std::string& out_csv) {
    const auto kind = lira::noise::parse_kind(disturbance);
    const auto res = lira::harness::run_eval(model, kind, trials,
                                             seed < 0 ? 0 : static_cast<uint64_t>(seed),
                                             out_csv);
    std::cout << "trials " << res.returns.size() << "; iqm " << res.iqm << "\n";
    return 0;
}

int cmd_aggregate(const std::string& input) {
    std::ifstream f(input);
    if (!f) throw std::invalid_argument("cannot open " + input);
    std::vector<double> values;
    std::string line;
    while (std::getline(f, line)) {
        const size_t comma = line.find_last_of(',');
        const std::string field = comma == std::string::npos ? line : line.substr(comma + 1);
        try {
            size_t pos = 0;
            const double v = std::stod(field, &pos);
            if (pos == field.size()) values.push_back(v);
        } catch (const std::exception&) {
            // header or blank line
        }
    }
    const auto agg = lira::stats::aggregate_models(values);
    std::cout << "n " << values.size() << "; kept " << agg.kept << "; mean " << agg.mean
              << "; ci95_half " << agg.ci_half << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adversarial world-model learning with a light-robust constraint"};
    app.require_subcommand(1);

    std::string cfg_path, train_out;
    long long train_seed = -1;
    int train_episodes = -1;
    auto* train = app.add_subcommand("train", "run a training experiment");
    train->add_option("--config", cfg_path, "experiment config file")->required();
    train->add_option("--seed", train_seed, "seed override");
    train->add_option("--out", train_out, "output directory override");
    train->add_option("--episodes", train_episodes, "episode-count override");

    std::string model_path, disturbance = "nominal", eval_out;
    int trials = 30;
    long long eval_seed = 0;
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint under a test noise");
    eval->add_option("--model", model_path, "checkpoint file")->required();
    eval->add_option("--disturbance", disturbance, "nominal | brown3 | brown6");
    eval->add_option("--trials", trials, "number of evaluation trials");
    eval->add_option("--seed", eval_seed, "evaluation seed");
    eval->add_option("--out", eval_out, "per-trial returns CSV path");

    std::string agg_input;
    auto* agg = app.add_subcommand("aggregate", "aggregate per-model scores");
    agg->add_option("--input", agg_input, "CSV of per-model scores (last column)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (train->parsed()) return cmd_train(cfg_path, train_seed, train_out, train_episodes);
        if (eval->parsed()) return cmd_eval(model_path, disturbance, trials, eval_seed, eval_out);
        if (agg->parsed()) return cmd_aggregate(agg_input);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
