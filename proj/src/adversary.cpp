#include "lira/adversary.hpp"

#include <algorithm>
#include <cmath>

namespace lira::model {

Adversary::Adversary(const AdversaryConfig& cfg, Rng& rng) : cfg_(cfg) {
    flows::FlowStackConfig fc;
    fc.dims = cfg.dist_dim;
    fc.layers = cfg.flow_layers;
    fc.spline.bins = cfg.flow_bins;
    fc.spline.bound = cfg.d_max;
    fc.spline.tau = cfg.tau;
    fc.spline.odd = false;
    fc.cond_in = cfg.state_dim;
    fc.cond_hidden.clear();
    fc.cond_hidden_acts.clear();
    for (int h : cfg.feature_hidden) {
        fc.cond_hidden.push_back(h);
        fc.cond_hidden_acts.push_back(nn::Hidden::SquishRmsNorm);
    }
    for (int h : cfg.head_hidden) {
        fc.cond_hidden.push_back(h);
        fc.cond_hidden_acts.push_back(nn::Hidden::Squaresign);
    }
    fc.name = "adversary";
    flow_ = flows::FlowStack(fc, rng);
}

Array Adversary::sample(const Array& state, Rng& rng) const {
    const dist::UniformBox base{cfg_.d_max, cfg_.dist_dim};
    Array u = base.sample(rng).reshaped(2, 1, cfg_.dist_dim);
    const Array cond = state.rank() == 2 ? state : state.reshaped(2, 1, state.size());
    const auto fwd = flow_.forward_value(u, cond);
    Array d = Array::vec(cfg_.dist_dim);
    for (int j = 0; j < cfg_.dist_dim; ++j)
        d[j] = std::clamp(fwd.out[j], -cfg_.d_max, cfg_.d_max);
    return d;
}

Var Adversary::log_prob(const Var& x, const Var& states) const {
    const auto inv = flow_.inverse(x, states);
    const dist::UniformBox base{cfg_.d_max, cfg_.dist_dim};
    return add(inv.log_det, base.log_density());
}

Var Adversary::resample(const Array& d, const Array& states) const {
    const auto inv = flow_.inverse_value(d, states);
    const auto fwd = flow_.forward(ad::constant(inv.out), ad::constant(states));
    return fwd.out;
}

Var Adversary::kl_mc(const dist::ClippedGaussian& prior, const Var& samples,
                     const Var& states) const {
    return mean_all(sub(log_prob(samples, states), prior.log_prob(samples)));
}

double Adversary::sample_std(const Array& states, int draws_per_state, Rng& rng) const {
    const int n = states.rows();
    std::vector<double> xs;
    xs.reserve(static_cast<size_t>(n) * draws_per_state * cfg_.dist_dim);
    for (int i = 0; i < n; ++i) {
        Array row = Array::mat(1, states.cols());
        for (int j = 0; j < states.cols(); ++j) row[j] = states.at(i, j);
        for (int k = 0; k < draws_per_state; ++k) {
            const Array d = sample(row, rng);
            for (int j = 0; j < d.size(); ++j) xs.push_back(d[j]);
        }
    }
    double mean = 0.0;
    for (double v : xs) mean += v;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double v : xs) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0));
}

} // namespace lira::model
