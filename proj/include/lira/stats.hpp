#pragma once

#include <vector>

namespace lira::stats {

/// Interquartile mean: drops floor(n/4) values from each end of the sorted
/// sample, then averages the rest.
double iqm(std::vector<double> v);

/// Linear-interpolation quantile (the common "type 7" rule) on sorted data.
double quantile_sorted(const std::vector<double>& sorted, double p);

struct Aggregate {
    double mean = 0.0;
    double ci_half = 0.0;  // 95% t-interval half width
    int kept = 0;          // samples surviving both exclusions
};

/// Cross-model aggregation: requires >= 4 values; drops one best and one
/// worst, then drops 1.5-IQR outliers of the remainder, then reports the mean
/// with a 95% t-interval. Throws std::invalid_argument below 4 values.
Aggregate aggregate_models(std::vector<double> values);

/// Per-model combined score: (nominal - global best nominal) plus, for every
/// tested noise condition (the nominal one included), the shortfall against
/// the method's own best nominal model.
/// `noise_scores[0]` must be the nominal-condition score.
double combined_metric(const std::vector<double>& noise_scores,
                       double global_best_nominal, double method_best_nominal);

} // namespace lira::stats
