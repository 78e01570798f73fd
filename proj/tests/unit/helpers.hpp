#pragma once

// Shared oracles for the unit suites: central finite differences against the
// reverse-mode gradients, parameter randomization, and small numeric utils.

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lira/autodiff.hpp"
#include "lira/rng.hpp"

namespace lira::test {

using ad::Array;
using ad::Var;

/// Marks a parameter's stored gradient as stale so a later read cannot pick
/// up leftovers from an earlier backward pass.
inline void clear_grad(const Var& p) {
    if (p.defined()) p.node()->grad_ready = false;
}

/// Gradient of `p` from the most recent backward pass; zeros if unreached.
inline Array grad_or_zero(const Var& p) {
    return p.has_grad() ? p.grad() : p.value().zeros_like();
}

/// Fills every parameter with fresh Gaussian values of the given scale.
inline void randomize_params(const std::vector<Var>& params, Rng& rng, double scale) {
    for (const Var& p : params) {
        Array& v = const_cast<Var&>(p).mutable_value();
        for (int i = 0; i < v.size(); ++i) v[i] = rng.normal(0.0, scale);
    }
}

struct FdReport {
    double max_rel = 0.0;   // worst relative error actually observed
    int checked = 0;        // parameter coordinates compared
    std::string worst;      // location of the worst coordinate
    bool ok = true;
};

/// Central-finite-difference oracle. `build` must construct the scalar loss
/// from the parameters' *current* values (a fresh graph every call). The
/// reverse-mode gradient of one unperturbed build is compared per coordinate
/// against (f(p+h) - f(p-h)) / 2h. `sign` multiplies the FD reference, so a
/// gradient-reversal path can be checked by passing -1.
inline FdReport fd_check(const std::function<Var()>& build,
                         const std::vector<Var>& params, double h = 1e-6,
                         double tol = 1e-4, double sign = 1.0) {
    FdReport rep;
    for (const Var& p : params) clear_grad(p);
    const Var root = build();
    ad::backward(root);

    std::vector<Array> grads;
    grads.reserve(params.size());
    for (const Var& p : params) grads.push_back(grad_or_zero(p));

    for (size_t pi = 0; pi < params.size(); ++pi) {
        Array& v = const_cast<Var&>(params[pi]).mutable_value();
        for (int i = 0; i < v.size(); ++i) {
            const double keep = v[i];
            v[i] = keep + h;
            const double fp = build().value()[0];
            v[i] = keep - h;
            const double fm = build().value()[0];
            v[i] = keep;

            const double fd = sign * (fp - fm) / (2.0 * h);
            const double g = grads[pi][i];
            const double err = std::abs(g - fd);
            const double denom = std::max({std::abs(g), std::abs(fd), 1e-4});
            const double rel = err / denom;
            ++rep.checked;
            if (rel > rep.max_rel) {
                rep.max_rel = rel;
                std::ostringstream os;
                os << params[pi].name() << "[" << i << "] grad=" << g << " fd=" << fd;
                rep.worst = os.str();
            }
            if (rel > tol) rep.ok = false;
        }
    }
    return rep;
}

/// Composite Simpson integral of f over [a, b] with n (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int n) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double stddev_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace lira::test
