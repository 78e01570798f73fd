#include "lira/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace lira::stats {

double iqm(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("iqm of empty sample");
    std::sort(v.begin(), v.end());
    const size_t drop = v.size() / 4;
    double sum = 0.0;
    size_t n = 0;
    for (size_t i = drop; i < v.size() - drop; ++i) {
        sum += v[i];
        ++n;
    }
    return sum / static_cast<double>(n);
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    if (sorted.size() == 1) return sorted[0];
    const double h = p * (static_cast<double>(sorted.size()) - 1.0);
    const size_t lo = static_cast<size_t>(std::floor(h));
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Aggregate aggregate_models(std::vector<double> values) {
    if (values.size() < 4)
        throw std::invalid_argument("aggregate_models needs at least 4 values");
    std::sort(values.begin(), values.end());
    values.erase(values.end() - 1);  // one best
    values.erase(values.begin());    // one worst

    const double q1 = quantile_sorted(values, 0.25);
    const double q3 = quantile_sorted(values, 0.75);
    const double iqr = q3 - q1;
    const double lo = q1 - 1.5 * iqr;
    const double hi = q3 + 1.5 * iqr;
    std::vector<double> kept;
    for (double v : values)
        if (v >= lo && v <= hi) kept.push_back(v);

    Aggregate out;
    out.kept = static_cast<int>(kept.size());
    double sum = 0.0;
    for (double v : kept) sum += v;
    out.mean = sum / static_cast<double>(kept.size());
    if (kept.size() >= 2) {
        double ss = 0.0;
        for (double v : kept) ss += (v - out.mean) * (v - out.mean);
        const double sd = std::sqrt(ss / (static_cast<double>(kept.size()) - 1.0));
        const boost::math::students_t dist(static_cast<double>(kept.size()) - 1.0);
        const double t = boost::math::quantile(dist, 0.975);
        out.ci_half = t * sd / std::sqrt(static_cast<double>(kept.size()));
    }
    return out;
}

double combined_metric(const std::vector<double>& noise_scores,
                       double global_best_nominal, double method_best_nominal) {
    if (noise_scores.empty())
        throw std::invalid_argument("combined_metric needs at least the nominal score");
    double m = noise_scores[0] - global_best_nominal;
    for (double s : noise_scores) m += s - method_best_nominal;
    return m;
}

} // namespace lira::stats
