#pragma once

#include "lira/array.hpp"
#include "lira/rng.hpp"

#include <string>
#include <vector>

namespace lira::noise {

using ad::Array;

enum class Kind { Nominal, Brown3, Brown6 };

Kind parse_kind(const std::string& s);  // "nominal" | "brown3" | "brown6"
std::string kind_name(Kind k);

/// Test-time disturbance source. Nominal draws i.i.d. clipped Gaussians per
/// step; the Brownian kinds pre-generate, per coordinate, a softmax mixture of
/// Brownian paths rescaled so the sequence's sample std is exactly k * sigma0
/// before clipping.
class NoiseGen {
public:
    struct Params {
        Kind kind = Kind::Nominal;
        int dim = 1;
        int t_max = 500;
        double sigma0 = 0.2 / 3.0;
        double d_max = 1.0;
        int mixture_paths = 2;  // K signal paths (plus K logit paths)
    };

    NoiseGen() = default;
    explicit NoiseGen(const Params& p) : p_(p) {}

    /// Pre-generates the episode's sequence for the Brownian kinds.
    void reset(Rng& rng);

    /// Disturbance at step t, clipped to [-d_max, d_max].
    Array emit(int t, Rng& rng) const;

    /// Pre-clipping value at step t (Brownian kinds only; used for exactness checks).
    double raw(int t, int coord) const { return seq_.at(t, coord); }

    long degenerate_resamples() const { return degenerate_; }
    const Params& params() const { return p_; }
    static double scale_factor(Kind k);  // 0 (nominal), 3, 6

private:
    Params p_;
    Array seq_;  // [t_max, dim] pre-generated, pre-clipping
    long degenerate_ = 0;
};

} // namespace lira::noise
