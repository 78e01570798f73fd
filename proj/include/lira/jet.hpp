#pragma once

#include <array>
#include <cmath>

namespace lira::flows {

/// Forward-mode dual number with a runtime-length tangent vector (capacity
/// bounded at compile time). Used to obtain exact local Jacobians of the
/// spline kernel without hand-derived backward formulas.
struct Jet {
    static constexpr int kCapacity = 66;

    double a = 0.0;
    int n = 0;
    std::array<double, kCapacity> v{};

    Jet() = default;
    explicit Jet(double value) : a(value), n(0) {}
    Jet(double value, int ntan, int seed_index) : a(value), n(ntan) {
        v.fill(0.0);
        v[static_cast<size_t>(seed_index)] = 1.0;
    }
};

inline Jet make_const(double value, int ntan) {
    Jet j(value);
    j.n = ntan;
    j.v.fill(0.0);
    return j;
}

inline Jet operator+(const Jet& x, const Jet& y) {
    Jet r(x.a + y.a);
    r.n = x.n > y.n ? x.n : y.n;
    for (int i = 0; i < r.n; ++i) r.v[i] = x.v[i] + y.v[i];
    return r;
}

inline Jet operator-(const Jet& x, const Jet& y) {
    Jet r(x.a - y.a);
    r.n = x.n > y.n ? x.n : y.n;
    for (int i = 0; i < r.n; ++i) r.v[i] = x.v[i] - y.v[i];
    return r;
}

inline Jet operator-(const Jet& x) {
    Jet r(-x.a);
    r.n = x.n;
    for (int i = 0; i < r.n; ++i) r.v[i] = -x.v[i];
    return r;
}

inline Jet operator*(const Jet& x, const Jet& y) {
    Jet r(x.a * y.a);
    r.n = x.n > y.n ? x.n : y.n;
    for (int i = 0; i < r.n; ++i) r.v[i] = x.v[i] * y.a + x.a * y.v[i];
    return r;
}

inline Jet operator/(const Jet& x, const Jet& y) {
    Jet r(x.a / y.a);
    r.n = x.n > y.n ? x.n : y.n;
    const double inv = 1.0 / y.a;
    for (int i = 0; i < r.n; ++i) r.v[i] = (x.v[i] - r.a * y.v[i]) * inv;
    return r;
}

inline Jet operator+(const Jet& x, double c) { Jet r = x; r.a += c; return r; }
inline Jet operator+(double c, const Jet& x) { return x + c; }
inline Jet operator-(const Jet& x, double c) { Jet r = x; r.a -= c; return r; }
inline Jet operator-(double c, const Jet& x) { return -(x - c); }

inline Jet operator*(const Jet& x, double c) {
    Jet r(x.a * c);
    r.n = x.n;
    for (int i = 0; i < r.n; ++i) r.v[i] = x.v[i] * c;
    return r;
}
inline Jet operator*(double c, const Jet& x) { return x * c; }

inline Jet operator/(const Jet& x, double c) { return x * (1.0 / c); }
inline Jet operator/(double c, const Jet& x) {
    Jet r(c / x.a);
    r.n = x.n;
    const double f = -r.a / x.a;
    for (int i = 0; i < r.n; ++i) r.v[i] = f * x.v[i];
    return r;
}

inline Jet sqrt(const Jet& x) {
    Jet r(std::sqrt(x.a));
    r.n = x.n;
    const double f = 0.5 / r.a;
    for (int i = 0; i < r.n; ++i) r.v[i] = f * x.v[i];
    return r;
}

inline Jet exp(const Jet& x) {
    Jet r(std::exp(x.a));
    r.n = x.n;
    for (int i = 0; i < r.n; ++i) r.v[i] = r.a * x.v[i];
    return r;
}

inline Jet log(const Jet& x) {
    Jet r(std::log(x.a));
    r.n = x.n;
    const double f = 1.0 / x.a;
    for (int i = 0; i < r.n; ++i) r.v[i] = f * x.v[i];
    return r;
}

// Plain-double analogues so the spline kernel can be instantiated with T = double.
inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.a; }
inline double make_scalar(double v, double) { return v; }
inline Jet make_scalar(double v, const Jet& like) { return make_const(v, like.n); }

} // namespace lira::flows
