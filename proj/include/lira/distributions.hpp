#pragma once

#include "lira/autodiff.hpp"
#include "lira/rng.hpp"

namespace lira::dist {

using ad::Array;
using ad::Var;

inline constexpr double kLog2Pi = 1.8378770664093454836;

/// Shared core of the diagonal-Gaussian log-density in the standardized frame:
/// given z rows (residuals already divided by scale) and the scale rows,
/// returns per-row  -0.5*sum(z^2) - sum(ln scale) - 0.5*d*ln(2*pi).
/// Both the marginalized and the flow-corrected densities are built on this
/// exact expression so they agree bitwise when the flow is the identity.
Var gaussian_core(const Var& z, const Var& scale);

/// log N(x; loc, scale) per row; x, loc, scale all [n,d].
Var diag_gaussian_log_prob(const Var& x, const Var& loc, const Var& scale);

double diag_gaussian_log_prob_v(const double* x, const double* loc,
                                const double* scale, int d);

/// Uniform distribution on the box [-half_width, half_width]^dim.
struct UniformBox {
    double half_width = 1.0;
    int dim = 1;

    double log_density() const;  // constant on the support
    Array sample(Rng& rng) const;
};

/// Nominal-noise prior: i.i.d. N(0, sigma) per coordinate with samples clipped
/// to [-half_width, half_width]. Densities are evaluated with the unclipped
/// Gaussian form; the support covers the whole box so it is never zero there.
struct ClippedGaussian {
    double sigma = 0.2 / 3.0;
    double half_width = 1.0;
    int dim = 1;

    Array sample(Rng& rng) const;
    Var log_prob(const Var& x) const;     // [n,dim] -> [n]
    double log_prob_v(const double* x) const;
};

} // namespace lira::dist
