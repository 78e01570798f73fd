#include "lira/flows.hpp"

#include <stdexcept>

namespace lira::flows {

FlowStack::FlowStack(const FlowStackConfig& cfg, Rng& rng) : cfg_(cfg) {
    nn::MlpSpec spec;
    spec.in = cfg.cond_in;
    spec.hidden = cfg.cond_hidden;
    spec.hidden_acts = cfg.cond_hidden_acts;
    spec.hidden_act = nn::Hidden::Squaresign;
    spec.out = cfg.layers * cfg.dims * cfg.spline.params_per_dim();
    spec.head = nn::Head::Linear;
    spec.zero_init_last = true;
    spec.name = cfg.name + ".cond";
    conditioner_ = nn::Mlp(spec, rng);
}

Var FlowStack::raw_for_layer(const Var& all, int layer) const {
    const int w = cfg_.dims * cfg_.spline.params_per_dim();
    return slice_cols(all, layer * w, (layer + 1) * w);
}

FlowStack::Result FlowStack::forward(const Var& u, const Var& cond) const {
    const Var all = conditioner_.forward(cond);
    const int d = cfg_.dims;
    Var h = u;
    Var total = ad::constant(Array::vec(u.value().rows()));
    for (int l = 0; l < cfg_.layers; ++l) {
        const Var r = spline_apply(h, raw_for_layer(all, l), cfg_.spline, false);
        h = slice_cols(r, 0, d);
        total = add(total, row_sum(slice_cols(r, d, 2 * d)));
    }
    return {h, total};
}

FlowStack::Result FlowStack::inverse(const Var& x, const Var& cond) const {
    const Var all = conditioner_.forward(cond);
    const int d = cfg_.dims;
    Var h = x;
    Var total = ad::constant(Array::vec(x.value().rows()));
    for (int l = cfg_.layers - 1; l >= 0; --l) {
        const Var r = spline_apply(h, raw_for_layer(all, l), cfg_.spline, true);
        h = slice_cols(r, 0, d);
        total = add(total, row_sum(slice_cols(r, d, 2 * d)));
    }
    // The stored per-element terms are logs of the forward derivative, so the
    // inverse map's own log-Jacobian is their negated sum.
    return {h, neg(total)};
}

FlowStack::ValueResult FlowStack::forward_value(const Array& u, const Array& cond) const {
    const Array all = conditioner_.forward_value(cond);
    const int d = cfg_.dims;
    const int n = u.rank() == 2 ? u.rows() : 1;
    const int ppd = cfg_.spline.params_per_dim();
    Array h = u;
    Array total = Array::vec(n);
    for (int l = 0; l < cfg_.layers; ++l) {
        for (int i = 0; i < n; ++i) {
            const double* raw =
                all.data() + static_cast<size_t>(i) * all.cols() + (l * d) * ppd;
            for (int j = 0; j < d; ++j) {
                double y, ld;
                spline_forward_v(raw + j * ppd, cfg_.spline, h[i * d + j], y, ld);
                h[i * d + j] = y;
                total[i] += ld;
            }
        }
    }
    return {h, total};
}

FlowStack::ValueResult FlowStack::inverse_value(const Array& x, const Array& cond) const {
    const Array all = conditioner_.forward_value(cond);
    const int d = cfg_.dims;
    const int n = x.rank() == 2 ? x.rows() : 1;
    const int ppd = cfg_.spline.params_per_dim();
    Array h = x;
    Array total = Array::vec(n);
    for (int l = cfg_.layers - 1; l >= 0; --l) {
        for (int i = 0; i < n; ++i) {
            const double* raw =
                all.data() + static_cast<size_t>(i) * all.cols() + (l * d) * ppd;
            for (int j = 0; j < d; ++j) {
                double u, ld;
                spline_inverse_v(raw + j * ppd, cfg_.spline, h[i * d + j], u, ld);
                h[i * d + j] = u;
                total[i] -= ld;
            }
        }
    }
    return {h, total};
}

} // namespace lira::flows
