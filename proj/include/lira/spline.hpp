#pragma once

#include "lira/autodiff.hpp"

namespace lira::flows {

/// Monotone linear rational spline on a bounded interval with identity tails.
/// Odd layers act on [0, B] mirrored about the origin (g(-u) = -g(u)); plain
/// layers act on [-B, B] with unit boundary derivatives. The transformability
/// blend pulls knot values toward the diagonal and knot derivatives toward 1,
/// so tau = 0 is exactly the identity while the transform stays a genuine
/// rational spline with an analytic per-segment inverse for every tau.
struct SplineConfig {
    int bins = 8;
    double bound = 5.0;
    double tau = 0.99;
    bool odd = true;

    static constexpr int kMaxBins = 16;

    int params_per_dim() const { return odd ? 4 * bins : 4 * bins - 1; }
};

/// Value-path kernels; `raw` points at params_per_dim() unconstrained reals.
/// `log_deriv` is ln(d forward / d input) at the forward-input point in both
/// directions (so the inverse's own log-Jacobian is its negation).
void spline_forward_v(const double* raw, const SplineConfig& cfg,
                      double u, double& y, double& log_deriv);
void spline_inverse_v(const double* raw, const SplineConfig& cfg,
                      double y, double& u, double& log_deriv);

/// Graph op. input: [n,d] (or [d]); raw: [n, d*ppd]. Returns [n, 2d]: columns
/// [0,d) hold the transformed values, [d,2d) the per-element log_deriv as
/// defined above. Backward is exact (forward-mode jets per element).
ad::Var spline_apply(const ad::Var& input, const ad::Var& raw,
                     const SplineConfig& cfg, bool inverse);

} // namespace lira::flows
