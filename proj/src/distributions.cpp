#include "lira/distributions.hpp"

#include <algorithm>
#include <cmath>

namespace lira::dist {

Var gaussian_core(const Var& z, const Var& scale) {
    const int d = z.value().cols();
    Var quad = mul(row_sum(square(z)), -0.5);
    Var logdet = row_sum(log_op(scale));
    return sub(sub(quad, logdet), 0.5 * d * kLog2Pi);
}

Var diag_gaussian_log_prob(const Var& x, const Var& loc, const Var& scale) {
    return gaussian_core(div(sub(x, loc), scale), scale);
}

double diag_gaussian_log_prob_v(const double* x, const double* loc,
                                const double* scale, int d) {
    double quad = 0.0, logdet = 0.0;
    for (int j = 0; j < d; ++j) {
        const double z = (x[j] - loc[j]) / scale[j];
        quad += z * z;
        logdet += std::log(scale[j]);
    }
    return -0.5 * quad - logdet - 0.5 * d * kLog2Pi;
}

double UniformBox::log_density() const {
    return -dim * std::log(2.0 * half_width);
}

Array UniformBox::sample(Rng& rng) const {
    Array out = Array::vec(dim);
    for (int j = 0; j < dim; ++j) out[j] = rng.uniform(-half_width, half_width);
    return out;
}

Array ClippedGaussian::sample(Rng& rng) const {
    Array out = Array::vec(dim);
    for (int j = 0; j < dim; ++j)
        out[j] = std::clamp(rng.normal(0.0, sigma), -half_width, half_width);
    return out;
}

Var ClippedGaussian::log_prob(const Var& x) const {
    const Var z = mul(x, 1.0 / sigma);
    const int d = x.value().cols();
    Var quad = mul(row_sum(square(z)), -0.5);
    return sub(quad, d * (std::log(sigma) + 0.5 * kLog2Pi));
}

double ClippedGaussian::log_prob_v(const double* x) const {
    double quad = 0.0;
    for (int j = 0; j < dim; ++j) {
        const double z = x[j] / sigma;
        quad += z * z;
    }
    return -0.5 * quad - dim * (std::log(sigma) + 0.5 * kLog2Pi);
}

} // namespace lira::dist
