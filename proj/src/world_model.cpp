#include "lira/world_model.hpp"

#include <cmath>
#include <stdexcept>

namespace lira::model {

WorldModel::WorldModel(const WorldModelConfig& cfg, Rng& rng) : cfg_(cfg) {
    nn::MlpSpec trunk;
    trunk.in = cfg.state_dim + cfg.action_dim;
    trunk.hidden = cfg.hidden;
    trunk.out = 2 * cfg.target_dim();
    trunk.hidden_act = nn::Hidden::SquishRmsNorm;
    trunk.head = nn::Head::Linear;
    trunk.name = "model.trunk";
    trunk_ = nn::Mlp(trunk, rng);

    flows::FlowStackConfig fc;
    fc.dims = cfg.target_dim();
    fc.layers = cfg.flow_layers;
    fc.spline.bins = cfg.flow_bins;
    fc.spline.bound = cfg.flow_bound;
    fc.spline.tau = cfg.tau;
    fc.spline.odd = cfg.odd_flow;
    fc.cond_in = cfg.dist_dim;
    fc.cond_hidden = cfg.cond_hidden;
    fc.name = "model.residual_flow";
    flow_ = flows::FlowStack(fc, rng);
}

WorldModel::Heads WorldModel::heads(const Var& s, const Var& a) const {
    const Var sa = concat_cols(s, a);
    const Var out = trunk_.forward(sa);
    const int m = cfg_.target_dim();
    Heads h;
    h.loc = slice_cols(out, 0, m);
    h.scale = add(nn::squish(slice_cols(out, m, 2 * m)), cfg_.scale_floor);
    return h;
}

Var WorldModel::marg_log_prob(const Heads& h, const Var& x) const {
    return dist::gaussian_core(div(sub(x, h.loc), h.scale), h.scale);
}

Var WorldModel::aware_log_prob(const Heads& h, const Var& x, const Var& d) const {
    const Var z = div(sub(x, h.loc), h.scale);
    const auto inv = flow_.inverse(z, d);
    return add(dist::gaussian_core(inv.out, h.scale), inv.log_det);
}

void WorldModel::predict_value(const Array& sa, Array& loc, Array& scale) const {
    const Array out = trunk_.forward_value(sa);
    const int m = cfg_.target_dim();
    const int n = out.rows();
    loc = Array::mat(n, m);
    scale = Array::mat(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            loc.at(i, j) = out.at(i, j);
            scale.at(i, j) = nn::squish_v(out.at(i, m + j)) + cfg_.scale_floor;
        }
    }
}

Array WorldModel::sample_marginal(const Array& loc, const Array& scale, int row,
                                  Rng& rng) const {
    const int m = cfg_.target_dim();
    Array x = Array::vec(m);
    for (int j = 0; j < m; ++j)
        x[j] = loc.at(row, j) + scale.at(row, j) * rng.normal();
    return x;
}

Array WorldModel::sample_aware(const Array& loc, const Array& scale, const Array& d,
                               int row, Rng& rng) const {
    const int m = cfg_.target_dim();
    Array v = Array::mat(1, m);
    for (int j = 0; j < m; ++j) v[j] = rng.normal();
    const Array cond = d.rank() == 2 ? d : d.reshaped(2, 1, d.size());
    const auto fwd = flow_.forward_value(v, cond);
    Array x = Array::vec(m);
    for (int j = 0; j < m; ++j)
        x[j] = loc.at(row, j) + scale.at(row, j) * fwd.out[j];
    return x;
}

std::vector<Var> WorldModel::params() const {
    std::vector<Var> out = trunk_.params();
    for (const auto& p : flow_.params()) out.push_back(p);
    return out;
}

} // namespace lira::model
