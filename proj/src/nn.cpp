#include "lira/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace lira::nn {

namespace {
constexpr double kRmsEps = 1e-8;
}

Var squish(const Var& x) {
    return mul(add(x, sqrt_op(add(square(x), 4.0))), 0.5);
}

Var squaresign(const Var& x) {
    return mul(x, pow_op(add(square(x), 1.0), -0.5));
}

Var squmoid(const Var& x) {
    return mul(add(squaresign(x), 1.0), 0.5);
}

Var rmsnorm_rows(const Var& x) {
    const Var inv_rms = pow_op(add(row_mean(square(x)), kRmsEps), -0.5);
    return scale_rows(x, inv_rms);
}

double squish_v(double x) { return 0.5 * (x + std::sqrt(x * x + 4.0)); }
double squaresign_v(double x) { return x / std::sqrt(1.0 + x * x); }
double squmoid_v(double x) { return 0.5 * (squaresign_v(x) + 1.0); }

Var apply_head(Head head, const Var& z) {
    switch (head) {
        case Head::Linear: return z;
        case Head::Positive: return squish(z);
        case Head::Bounded01: return squmoid(z);
        case Head::BoundedSym: return squaresign(z);
    }
    throw std::logic_error("apply_head: bad head");
}

double apply_head_v(Head head, double z) {
    switch (head) {
        case Head::Linear: return z;
        case Head::Positive: return squish_v(z);
        case Head::Bounded01: return squmoid_v(z);
        case Head::BoundedSym: return squaresign_v(z);
    }
    throw std::logic_error("apply_head_v: bad head");
}

Mlp::Mlp(const MlpSpec& spec, Rng& rng) : spec_(spec) {
    std::vector<int> dims;
    dims.push_back(spec.in);
    for (int h : spec.hidden) dims.push_back(h);
    dims.push_back(spec.out);
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
        const int fan_in = dims[l], fan_out = dims[l + 1];
        Array w = Array::mat(fan_in, fan_out);
        const bool last = (l + 2 == dims.size());
        if (!(last && spec.zero_init_last)) {
            const double bound = spec.init_gain * std::sqrt(1.0 / fan_in);
            for (int i = 0; i < w.size(); ++i) w[i] = rng.uniform(-bound, bound);
        }
        weights_.push_back(ad::parameter(std::move(w), spec.name + ".w" + std::to_string(l)));
        biases_.push_back(ad::parameter(Array::vec(fan_out),
                                        spec.name + ".b" + std::to_string(l)));
    }
}

Var Mlp::forward(const Var& x) const {
    const bool vector_in = x.value().rank() == 1;
    Var h = vector_in ? reshape(x, 2, 1, x.value().size()) : x;
    if (h.value().cols() != spec_.in)
        throw std::invalid_argument("Mlp::forward: input width mismatch");
    for (size_t l = 0; l < weights_.size(); ++l) {
        h = add_rows(matmul(h, weights_[l]), biases_[l]);
        if (l + 1 < weights_.size()) {
            if (spec_.act_at(l) == Hidden::SquishRmsNorm)
                h = rmsnorm_rows(squish(h));
            else
                h = squaresign(h);
        }
    }
    h = apply_head(spec_.head, h);
    return vector_in ? reshape(h, 1, spec_.out, 1) : h;
}

Array Mlp::forward_value(const Array& x) const {
    const bool vector_in = x.rank() == 1;
    Array h = vector_in ? x.reshaped(2, 1, x.size()) : x;
    if (h.cols() != spec_.in)
        throw std::invalid_argument("Mlp::forward_value: input width mismatch");
    for (size_t l = 0; l < weights_.size(); ++l) {
        Array z = ad::matmul_value(h, weights_[l].value());
        const Array& b = biases_[l].value();
        for (int i = 0; i < z.rows(); ++i)
            for (int j = 0; j < z.cols(); ++j)
                z.at(i, j) += b[j];
        if (l + 1 < weights_.size()) {
            if (spec_.act_at(l) == Hidden::SquishRmsNorm) {
                for (int i = 0; i < z.rows(); ++i) {
                    double ms = 0.0;
                    for (int j = 0; j < z.cols(); ++j) {
                        z.at(i, j) = squish_v(z.at(i, j));
                        ms += z.at(i, j) * z.at(i, j);
                    }
                    const double inv = 1.0 / std::sqrt(ms / z.cols() + kRmsEps);
                    for (int j = 0; j < z.cols(); ++j) z.at(i, j) *= inv;
                }
            } else {
                for (int i = 0; i < z.size(); ++i) z[i] = squaresign_v(z[i]);
            }
        }
        h = std::move(z);
    }
    if (spec_.head != Head::Linear)
        for (int i = 0; i < h.size(); ++i) h[i] = apply_head_v(spec_.head, h[i]);
    return vector_in ? h.reshaped(1, h.size(), 1) : h;
}

std::vector<Var> Mlp::params() const {
    std::vector<Var> out;
    for (size_t l = 0; l < weights_.size(); ++l) {
        out.push_back(weights_[l]);
        out.push_back(biases_[l]);
    }
    return out;
}

Array Optimizer::grad_of(size_t i) const {
    const Var& p = params_[i];
    if (p.has_grad()) return p.grad();
    return p.value().zeros_like();
}

bool Optimizer::step() {
    for (const auto& p : params_) {
        if (p.has_grad() && !p.grad().all_finite()) {
            ++skipped_;
            return false;
        }
    }
    apply();
    return true;
}

Adam::Adam(std::vector<Var> params, AdamConfig cfg)
    : Optimizer(std::move(params)), cfg_(cfg) {
    for (const auto& p : params_) {
        m_.push_back(p.value().zeros_like());
        v_.push_back(p.value().zeros_like());
    }
}

void Adam::apply() {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (size_t i = 0; i < params_.size(); ++i) {
        const Array g = grad_of(i);
        Array& value = params_[i].mutable_value();
        Array& m = m_[i];
        Array& v = v_[i];
        for (int k = 0; k < value.size(); ++k) {
            m[k] = cfg_.beta1 * m[k] + (1.0 - cfg_.beta1) * g[k];
            v[k] = cfg_.beta2 * v[k] + (1.0 - cfg_.beta2) * g[k] * g[k];
            const double mhat = m[k] / bc1;
            const double vhat = v[k] / bc2;
            value[k] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

void Sgd::apply() {
    for (size_t i = 0; i < params_.size(); ++i) {
        const Array g = grad_of(i);
        Array& value = params_[i].mutable_value();
        for (int k = 0; k < value.size(); ++k) value[k] -= lr_ * g[k];
    }
}

} // namespace lira::nn
