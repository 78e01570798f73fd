#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lira/autodiff.hpp"
#include "lira/rng.hpp"

namespace lira::nn {

using ad::Array;
using ad::Var;

// Smooth algebraic activations; all are cheap, bounded-derivative and free of
// exp/log overflow. squish(0) == 1 exactly, which several identity-at-init
// constructions rely on.
Var squish(const Var& x);        // (x + sqrt(x^2 + 4)) / 2 > 0
Var squaresign(const Var& x);    // x / sqrt(1 + x^2) in (-1, 1)
Var squmoid(const Var& x);       // (squaresign(x) + 1) / 2 in (0, 1)
Var rmsnorm_rows(const Var& x);  // per row: x / sqrt(mean(x^2) + 1e-8)

double squish_v(double x);
double squaresign_v(double x);
double squmoid_v(double x);

enum class Hidden { SquishRmsNorm, Squaresign };
enum class Head { Linear, Positive, Bounded01, BoundedSym };

Var apply_head(Head head, const Var& z);
double apply_head_v(Head head, double z);

struct MlpSpec {
    int in = 1;
    std::vector<int> hidden{100, 100};
    int out = 1;
    Hidden hidden_act = Hidden::SquishRmsNorm;
    std::vector<Hidden> hidden_acts;  // optional per-layer override
    Head head = Head::Linear;
    double init_gain = 1.0;
    bool zero_init_last = false;  // identity-at-init for flow conditioners
    std::string name = "mlp";

    Hidden act_at(size_t layer) const {
        return layer < hidden_acts.size() ? hidden_acts[layer] : hidden_act;
    }
};

/// Fully-connected network; parameters are persistent graph leaves named
/// "<name>.w<i>" / "<name>.b<i>".
class Mlp {
public:
    Mlp() = default;
    Mlp(const MlpSpec& spec, Rng& rng);

    /// x is [n,in] (or [in] for a single sample); result matches that rank.
    Var forward(const Var& x) const;
    /// Graph-free forward for planner rollouts and sampling.
    Array forward_value(const Array& x) const;

    const MlpSpec& spec() const { return spec_; }
    std::vector<Var> params() const;

private:
    MlpSpec spec_;
    std::vector<Var> weights_;
    std::vector<Var> biases_;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Optimizer over a fixed parameter group; reads gradients left on the
/// parameter nodes by ad::backward. A group step is skipped entirely (and
/// counted) when any gradient in the group is non-finite.
class Optimizer {
public:
    virtual ~Optimizer() = default;
    bool step();
    int skipped_steps() const { return skipped_; }
    const std::vector<Var>& params() const { return params_; }

protected:
    explicit Optimizer(std::vector<Var> params) : params_(std::move(params)) {}
    virtual void apply() = 0;
    std::vector<Var> params_;
    int skipped_ = 0;

    /// Gradient of params_[i], zeros when the last backward pass did not reach it.
    Array grad_of(size_t i) const;
};

class Adam : public Optimizer {
public:
    Adam(std::vector<Var> params, AdamConfig cfg = {});

private:
    void apply() override;
    AdamConfig cfg_;
    std::vector<Array> m_, v_;
    long t_ = 0;
};

class Sgd : public Optimizer {
public:
    Sgd(std::vector<Var> params, double lr) : Optimizer(std::move(params)), lr_(lr) {}

private:
    void apply() override;
    double lr_;
};

} // namespace lira::nn
