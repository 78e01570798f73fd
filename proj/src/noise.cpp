#include "lira/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lira::noise {

Kind parse_kind(const std::string& s) {
    if (s == "nominal") return Kind::Nominal;
    if (s == "brown3") return Kind::Brown3;
    if (s == "brown6") return Kind::Brown6;
    throw std::invalid_argument("unknown disturbance kind: " + s);
}

std::string kind_name(Kind k) {
    switch (k) {
        case Kind::Nominal: return "nominal";
        case Kind::Brown3: return "brown3";
        case Kind::Brown6: return "brown6";
    }
    return "?";
}

double NoiseGen::scale_factor(Kind k) {
    switch (k) {
        case Kind::Brown3: return 3.0;
        case Kind::Brown6: return 6.0;
        default: return 0.0;
    }
}

void NoiseGen::reset(Rng& rng) {
    if (p_.kind == Kind::Nominal) return;
    const int t_len = p_.t_max;
    const int kpaths = p_.mixture_paths;
    const double target = scale_factor(p_.kind) * p_.sigma0;
    seq_ = Array::mat(t_len, p_.dim);

    for (int c = 0; c < p_.dim; ++c) {
        for (int attempt = 0;; ++attempt) {
            // 2K Brownian paths: K signals then K softmax logits.
            std::vector<std::vector<double>> paths(
                static_cast<size_t>(2 * kpaths), std::vector<double>(static_cast<size_t>(t_len)));
            for (auto& path : paths) {
                double acc = 0.0;
                for (int t = 0; t < t_len; ++t) {
                    acc += rng.normal();
                    path[static_cast<size_t>(t)] = acc;
                }
            }
            std::vector<double> mix(static_cast<size_t>(t_len));
            for (int t = 0; t < t_len; ++t) {
                double lmax = paths[static_cast<size_t>(kpaths)][static_cast<size_t>(t)];
                for (int p = 1; p < kpaths; ++p)
                    lmax = std::max(lmax,
                                    paths[static_cast<size_t>(kpaths + p)][static_cast<size_t>(t)]);
                double z = 0.0, num = 0.0;
                for (int p = 0; p < kpaths; ++p) {
                    const double w = std::exp(
                        paths[static_cast<size_t>(kpaths + p)][static_cast<size_t>(t)] - lmax);
                    z += w;
                    num += w * paths[static_cast<size_t>(p)][static_cast<size_t>(t)];
                }
                mix[static_cast<size_t>(t)] = num / z;
            }
            double mean = 0.0;
            for (double v : mix) mean += v;
            mean /= static_cast<double>(t_len);
            double ss = 0.0;
            for (double v : mix) ss += (v - mean) * (v - mean);
            const double sd = std::sqrt(ss / (static_cast<double>(t_len) - 1.0));
            if (sd > 0.0) {
                const double gain = target / sd;
                for (int t = 0; t < t_len; ++t) seq_.at(t, c) = gain * mix[static_cast<size_t>(t)];
                break;
            }
            ++degenerate_;  // all-equal sequence: resample
            if (attempt > 100) throw std::runtime_error("noise generation degenerate");
        }
    }
}

Array NoiseGen::emit(int t, Rng& rng) const {
    Array d = Array::vec(p_.dim);
    if (p_.kind == Kind::Nominal) {
        for (int j = 0; j < p_.dim; ++j)
            d[j] = std::clamp(p_.sigma0 * rng.normal(), -p_.d_max, p_.d_max);
        return d;
    }
    const int tt = std::min(t, p_.t_max - 1);
    for (int j = 0; j < p_.dim; ++j)
        d[j] = std::clamp(seq_.at(tt, j), -p_.d_max, p_.d_max);
    return d;
}

} // namespace lira::noise
