#include "lira/spline.hpp"

#include <cmath>
#include <stdexcept>

#include "lira/jet.hpp"

namespace lira::flows {

namespace {

constexpr double kMinBinFrac = 1e-3;
constexpr double kLambdaLo = 0.025;
constexpr double kLambdaSpan = 0.95;

inline double sqrt(double x) { return std::sqrt(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }

template <typename T>
T squish_t(const T& x) {
    return (x + sqrt(x * x + 4.0)) * 0.5;
}

template <typename T>
T squmoid_t(const T& x) {
    return (x / sqrt(x * x + 1.0) + 1.0) * 0.5;
}

template <typename T>
struct Knots {
    int K = 0;
    T x[SplineConfig::kMaxBins + 1];
    T y[SplineConfig::kMaxBins + 1];
    T d[SplineConfig::kMaxBins + 1];
    T lam[SplineConfig::kMaxBins];
};

// Normalized positive fractions from raw values: softmax with a floor so no
// bin collapses. Writes K fractions summing to 1.
template <typename T>
void fractions(const T* raw, int K, T* out) {
    double mx = value_of(raw[0]);
    for (int k = 1; k < K; ++k) mx = std::max(mx, value_of(raw[k]));
    T z = make_scalar(0.0, raw[0]);
    for (int k = 0; k < K; ++k) {
        out[k] = exp(raw[k] - mx);
        z = z + out[k];
    }
    const double scale = 1.0 - K * kMinBinFrac;
    for (int k = 0; k < K; ++k)
        out[k] = out[k] / z * scale + kMinBinFrac;
}

template <typename T>
void build_knots(const T* raw, const SplineConfig& cfg, Knots<T>& kn) {
    const int K = cfg.bins;
    kn.K = K;
    const double lo = cfg.odd ? 0.0 : -cfg.bound;
    const double range = cfg.odd ? cfg.bound : 2.0 * cfg.bound;
    const T* raw_w = raw;
    const T* raw_h = raw + K;
    const T* raw_d = raw + 2 * K;
    const int nfree_d = cfg.odd ? K : K - 1;
    const T* raw_l = raw + 2 * K + nfree_d;

    T frac[SplineConfig::kMaxBins];
    fractions(raw_w, K, frac);
    kn.x[0] = make_scalar(lo, raw[0]);
    for (int k = 0; k < K; ++k) kn.x[k + 1] = kn.x[k] + frac[k] * range;

    fractions(raw_h, K, frac);
    kn.y[0] = make_scalar(lo, raw[0]);
    for (int k = 0; k < K; ++k) kn.y[k + 1] = kn.y[k] + frac[k] * range;

    // Free derivatives (squish, equal to 1 at raw 0); tail-side knots are
    // pinned to slope 1 for C1 continuity with the identity tails.
    const T one = make_scalar(1.0, raw[0]);
    if (cfg.odd) {
        for (int k = 0; k < K; ++k) kn.d[k] = squish_t(raw_d[k]);
        kn.d[K] = one;
    } else {
        kn.d[0] = one;
        for (int k = 0; k < K - 1; ++k) kn.d[k + 1] = squish_t(raw_d[k]);
        kn.d[K] = one;
    }

    // Transformability blend in knot space.
    const double tau = cfg.tau;
    for (int k = 0; k <= K; ++k) {
        kn.y[k] = kn.x[k] * (1.0 - tau) + kn.y[k] * tau;
        kn.d[k] = kn.d[k] * tau + (1.0 - tau);
    }
    for (int k = 0; k < K; ++k)
        kn.lam[k] = squmoid_t(raw_l[k]) * kLambdaSpan + kLambdaLo;
}

// Linear-rational pieces for bin k: weights (1, wm, wb) at (x_k, x_mid, x_k+1)
// with mid value ym; chosen so endpoint derivatives match d[k], d[k+1] and the
// two pieces join C1 at the mid point.
template <typename T>
struct BinGeom {
    T W, lam, wb, wm, ym, ya, yb;
};

template <typename T>
BinGeom<T> bin_geom(const Knots<T>& kn, int k) {
    BinGeom<T> g;
    g.W = kn.x[k + 1] - kn.x[k];
    const T H = kn.y[k + 1] - kn.y[k];
    g.lam = kn.lam[k];
    g.ya = kn.y[k];
    g.yb = kn.y[k + 1];
    g.wb = sqrt(kn.d[k] / kn.d[k + 1]);
    g.wm = (g.lam * kn.d[k] + (1.0 - g.lam) * g.wb * kn.d[k + 1]) * g.W / H;
    g.ym = ((1.0 - g.lam) * g.ya + g.lam * g.wb * g.yb) / ((1.0 - g.lam) + g.lam * g.wb);
    return g;
}

// Forward within bin k at normalized position theta in [0,1].
template <typename T>
void bin_forward(const BinGeom<T>& g, const T& theta, T& y, T& log_deriv) {
    if (value_of(theta) <= value_of(g.lam)) {
        const T den = (g.lam - theta) + g.wm * theta;
        y = (g.ya * (g.lam - theta) + g.wm * g.ym * theta) / den;
        log_deriv = log(g.wm * (g.ym - g.ya) * g.lam / (den * den * g.W));
    } else {
        const T den = g.wm * (1.0 - theta) + g.wb * (theta - g.lam);
        y = (g.wm * g.ym * (1.0 - theta) + g.wb * g.yb * (theta - g.lam)) / den;
        log_deriv = log(g.wm * g.wb * (g.yb - g.ym) * (1.0 - g.lam) / (den * den * g.W));
    }
}

// Inverse within bin k: recovers theta from y.
template <typename T>
void bin_inverse(const BinGeom<T>& g, const T& y, T& theta, T& log_deriv) {
    if (value_of(y) <= value_of(g.ym)) {
        theta = g.lam * (y - g.ya) / ((y - g.ya) + g.wm * (g.ym - y));
        const T den = (g.lam - theta) + g.wm * theta;
        log_deriv = log(g.wm * (g.ym - g.ya) * g.lam / (den * den * g.W));
    } else {
        const T num = g.wm * (g.ym - y) - g.lam * g.wb * (g.yb - y);
        const T den_t = g.wm * (g.ym - y) - g.wb * (g.yb - y);
        theta = num / den_t;
        const T den = g.wm * (1.0 - theta) + g.wb * (theta - g.lam);
        log_deriv = log(g.wm * g.wb * (g.yb - g.ym) * (1.0 - g.lam) / (den * den * g.W));
    }
}

template <typename T>
int find_bin(const T* knots, int K, double v) {
    int k = 0;
    while (k < K - 1 && v >= value_of(knots[k + 1])) ++k;
    return k;
}

// Forward through the positive-side (or full-interval) spline. `active` is the
// coordinate the spline acts on; returns the transformed value and the log of
// the forward derivative at `active`.
template <typename T>
void eval_forward(const Knots<T>& kn, const SplineConfig& cfg, const T& u,
                  T& y, T& log_deriv) {
    const T zero = make_scalar(0.0, u);
    if (cfg.odd && value_of(u) < 0.0) {
        T ypos, ld;
        eval_forward(kn, cfg, -u, ypos, ld);
        y = -ypos;
        log_deriv = ld;
        return;
    }
    const double hi = cfg.bound;
    const double lo = cfg.odd ? 0.0 : -cfg.bound;
    const double uv = value_of(u);
    if (uv >= hi || uv < lo) {
        y = u;
        log_deriv = zero;
        return;
    }
    const int k = find_bin(kn.x, kn.K, uv);
    const BinGeom<T> g = bin_geom(kn, k);
    const T theta = (u - kn.x[k]) / g.W;
    bin_forward(g, theta, y, log_deriv);
}

template <typename T>
void eval_inverse(const Knots<T>& kn, const SplineConfig& cfg, const T& x,
                  T& u, T& log_deriv) {
    const T zero = make_scalar(0.0, x);
    if (cfg.odd && value_of(x) < 0.0) {
        T upos, ld;
        eval_inverse(kn, cfg, -x, upos, ld);
        u = -upos;
        log_deriv = ld;
        return;
    }
    const double hi = cfg.bound;
    const double lo = cfg.odd ? 0.0 : -cfg.bound;
    const double xv = value_of(x);
    if (xv >= hi || xv < lo) {
        u = x;
        log_deriv = zero;
        return;
    }
    const int k = find_bin(kn.y, kn.K, xv);
    const BinGeom<T> g = bin_geom(kn, k);
    T theta;
    bin_inverse(g, x, theta, log_deriv);
    u = kn.x[k] + theta * g.W;
}

} // namespace

void spline_forward_v(const double* raw, const SplineConfig& cfg,
                      double u, double& y, double& log_deriv) {
    if (cfg.tau == 0.0) {
        y = u;
        log_deriv = 0.0;
        return;
    }
    Knots<double> kn;
    build_knots(raw, cfg, kn);
    eval_forward(kn, cfg, u, y, log_deriv);
}

void spline_inverse_v(const double* raw, const SplineConfig& cfg,
                      double x, double& u, double& log_deriv) {
    if (cfg.tau == 0.0) {
        u = x;
        log_deriv = 0.0;
        return;
    }
    Knots<double> kn;
    build_knots(raw, cfg, kn);
    eval_inverse(kn, cfg, x, u, log_deriv);
}

ad::Var spline_apply(const ad::Var& input, const ad::Var& raw,
                     const SplineConfig& cfg, bool inverse) {
    const ad::Array& in = input.value();
    const ad::Array& rv = raw.value();
    const int n = in.rank() == 2 ? in.rows() : 1;
    const int d = in.rank() == 2 ? in.cols() : in.size();
    const int ppd = cfg.params_per_dim();
    if (cfg.bins > SplineConfig::kMaxBins)
        throw std::invalid_argument("spline_apply: too many bins");
    if (rv.rank() != 2 || rv.rows() != n || rv.cols() != d * ppd)
        throw std::invalid_argument("spline_apply: raw params shape mismatch");

    ad::Array out = ad::Array::mat(n, 2 * d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
            const double* rblock = rv.data() + static_cast<size_t>(i) * rv.cols() + j * ppd;
            double y, ld;
            if (inverse)
                spline_inverse_v(rblock, cfg, in[i * d + j], y, ld);
            else
                spline_forward_v(rblock, cfg, in[i * d + j], y, ld);
            out.at(i, j) = y;
            out.at(i, d + j) = ld;
        }
    }

    const SplineConfig cc = cfg;
    return ad::make_op(std::move(out), {input.ptr(), raw.ptr()},
                       [cc, inverse, n, d, ppd](ad::Node& node) {
        ad::Node& pin = *node.parents[0];
        ad::Node& praw = *node.parents[1];
        if (cc.tau == 0.0) {
            // Identity short-circuit: d out / d input = 1, no parameter paths.
            if (pin.requires_grad)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < d; ++j)
                        pin.grad[i * d + j] += node.grad.at(i, j);
            return;
        }
        const int ntan = 1 + ppd;
        for (int i = 0; i < n; ++i) {
            Knots<Jet> kn;
            Jet raw_j[4 * SplineConfig::kMaxBins];
            for (int j = 0; j < d; ++j) {
                const double gy = node.grad.at(i, j);
                const double gl = node.grad.at(i, d + j);
                if (gy == 0.0 && gl == 0.0) continue;
                const double* rblock =
                    praw.value.data() + static_cast<size_t>(i) * praw.value.cols() + j * ppd;
                for (int t = 0; t < ppd; ++t) raw_j[t] = Jet(rblock[t], ntan, 1 + t);
                build_knots(raw_j, cc, kn);
                const Jet in_j(pin.value[i * d + j], ntan, 0);
                Jet y, ld;
                if (inverse)
                    eval_inverse(kn, cc, in_j, y, ld);
                else
                    eval_forward(kn, cc, in_j, y, ld);
                if (pin.requires_grad)
                    pin.grad[i * d + j] += gy * y.v[0] + gl * ld.v[0];
                if (praw.requires_grad) {
                    double* rg = praw.grad.data() +
                                 static_cast<size_t>(i) * praw.value.cols() + j * ppd;
                    for (int t = 0; t < ppd; ++t)
                        rg[t] += gy * y.v[1 + t] + gl * ld.v[1 + t];
                }
            }
        }
    });
}

} // namespace lira::flows
