#pragma once

#include "lira/adversary.hpp"
#include "lira/env.hpp"
#include "lira/planner.hpp"
#include "lira/replay.hpp"
#include "lira/world_model.hpp"

#include <memory>
#include <optional>
#include <string>

namespace lira::learn {

using ad::Array;
using ad::Var;

enum class Mode { Nominal, Full, Proposal, AblateLiRA, AblateRNF, AblateHRG, AblateMMB };

Mode parse_mode(const std::string& s);
std::string mode_name(Mode m);

/// Midrange-mean balancing of a per-sample loss vector. l_thetaphi blends the
/// batch midrange and mean by a graph-cut gamma; l_gamma trains gamma against
/// the detached statistics. With `ablate`, l_thetaphi is the plain mean and
/// l_gamma is undefined. Batches of one sample fall back to the mean.
struct MmbOut {
    Var l_thetaphi;
    Var l_gamma;
    Var l_mea;
    Var l_mid;
};
MmbOut mmb(const Var& losses, const Var& gamma_param, bool ablate);

/// Epsilon-insensitive slack objective: per sample,
///   l_Delta = lambda * Delta        if |delta| <= eps   (likelihoods detached)
///           = |delta|               otherwise           (grad reaches eta via Delta)
/// where delta = core + Delta and core = (l_m - l_a - rho) detached.
Var slack_loss(const Array& core_det, const Var& slack_live, const Array& lambda_det,
               double eps);

struct LearnerConfig {
    Mode mode = Mode::Proposal;
    double rho = 1.5;            // tolerated aware-vs-marginal log-likelihood gap
    double eps = 0.1;            // slack insensitivity threshold
    double beta = 1e-3;          // KL gain (scalar lambda)
    double beta_state = 5e-3;    // KL gain when lambda is state-dependent
    bool lambda_state_dependent = false;
    double lambda_fixed = -1.0;  // >= 0 pins lambda there (disables its tuning)
    double lambda_init = 0.5;
    double gamma_init = 0.01;
    double lr = 1e-3;
    int batch_size = 32;
    int buffer_capacity = 102400;
    model::WorldModelConfig model;
    model::AdversaryConfig adversary;
    std::vector<int> slack_hidden{100, 100};
    std::vector<int> lambda_hidden{100, 100};
};

struct EpochDiag {
    double loss_m = 0.0;       // mean marginal negative log-likelihood
    double loss_a = 0.0;       // mean aware negative log-likelihood
    double gap = 0.0;          // mean (loss_m - loss_a)
    double lambda_mean = 0.0;
    double gamma = 0.0;
    double adv_scale = 0.0;    // pooled adversary sample std on recent states
    long dropped = 0;          // samples dropped for non-finite likelihoods
    long batches = 0;
};

/// Full loss assembly for one batch; undefined Vars mark terms absent in the
/// active mode. Values are finite by construction (offending samples dropped).
struct BatchLosses {
    Var lm_mean;      // diagnostic mean of per-sample l^m
    Var la_mean;      // diagnostic mean of per-sample l^a (GRL path inside)
    Var l_thetaphi;
    Var l_gamma;
    Var l_phi;
    Var l_lambda;
    Var l_eta;
    Var total;
    Array lambda_det;  // per-sample lambda values used in the blend
    Array delta_det;   // per-sample detached gap delta
    long dropped = 0;
    int used = 0;      // samples surviving the finite filter
};

/// Alternates data collection and buffer-replay learning; owns the world
/// model, adversary, slack network, multipliers and their optimizers.
class Learner {
public:
    Learner(const LearnerConfig& cfg, Rng& rng);

    const LearnerConfig& config() const { return cfg_; }

    /// Collect one episode with MPC exploration; disturbances come from the
    /// adversary (prior in Nominal mode). Returns the undiscounted summed
    /// utility (plain sum of reward components).
    double collect_episode(env::Env& e, const plan::PlannerConfig& pcfg, Rng& rng);

    /// One uniform-without-replacement pass over the whole buffer.
    EpochDiag train_epoch(Rng& rng);

    /// Loss assembly on an explicit batch (testing and training). The rng
    /// feeds only the KL regularizer, whose Monte-Carlo samples are fresh
    /// draws from the current adversary; everything else is deterministic.
    BatchLosses build_losses(const Array& s, const Array& a, const Array& d,
                             const Array& x, Rng& rng);
    /// build + backward + per-group steps + multiplier clamping.
    void train_batch(const Array& s, const Array& a, const Array& d, const Array& x,
                     Rng& rng);

    /// Drives the multiplier with an externally supplied detached gap stream:
    /// builds l_lambda alone, backpropagates, steps and clamps. Exposes the
    /// exact update path used in training for dynamics checks.
    void tune_lambda(const Array& delta_det);

    model::WorldModel& world_model() { return model_; }
    const model::WorldModel& world_model() const { return model_; }
    model::Adversary& adversary() { return adversary_; }
    const model::Adversary& adversary() const { return adversary_; }
    replay::ReplayBuffer& buffer() { return buffer_; }
    const dist::ClippedGaussian& prior() const { return prior_; }
    nn::Mlp& slack_net() { return slack_; }

    double lambda_value() const;          // scalar (mean head output if state-dep.)
    double gamma_value() const { return gamma_.value()[0]; }
    Var lambda_param() const { return lambda_; }
    Var gamma_param() const { return gamma_; }

    bool lambda_auto() const;
    bool gamma_auto() const;
    bool adversary_trained() const;
    bool hrg_active() const;
    double beta_effective() const;

    std::vector<Var> theta_params() const { return model_.params(); }
    std::vector<Var> phi_params() const { return adversary_.params(); }
    std::vector<Var> eta_params() const { return slack_.params(); }
    std::vector<Var> lambda_net_params() const {
        return cfg_.lambda_state_dependent ? lambda_net_.params() : std::vector<Var>{};
    }

    long dropped_samples() const { return dropped_total_; }
    double adversary_scale(Rng& rng) const;  // pooled std over recent buffer states

private:
    Array lambda_per_sample(const Array& s) const;
    Var lambda_live(const Var& s) const;  // graph-carrying lambda (scalar or net)
    void apply_steps();                   // per-group steps plus multiplier clamps

    LearnerConfig cfg_;
    model::WorldModel model_;
    model::Adversary adversary_;
    nn::Mlp slack_;
    nn::Mlp lambda_net_;   // used only when lambda_state_dependent
    Var lambda_;           // scalar multiplier parameter
    Var gamma_;
    dist::ClippedGaussian prior_;
    replay::ReplayBuffer buffer_;

    std::unique_ptr<nn::Optimizer> opt_theta_;
    std::unique_ptr<nn::Optimizer> opt_phi_;
    std::unique_ptr<nn::Optimizer> opt_eta_;
    std::unique_ptr<nn::Optimizer> opt_lambda_;
    std::unique_ptr<nn::Optimizer> opt_gamma_;

    long dropped_total_ = 0;
};

/// Planner-facing view of the world model: batched mean predictions of the
/// joint (next state, reward) target.
class ModelDynamics final : public plan::DynamicsModel {
public:
    ModelDynamics(const model::WorldModel& m, int state_dim, int action_dim,
                  int reward_dim)
        : m_(m), sd_(state_dim), adim_(action_dim), rd_(reward_dim) {}

    int state_dim() const override { return sd_; }
    int action_dim() const override { return adim_; }
    int reward_dim() const override { return rd_; }
    void predict_mean(const Array& s, const Array& a, Array& s_next,
                      Array& r) const override;

private:
    const model::WorldModel& m_;
    int sd_, adim_, rd_;
};

} // namespace lira::learn
