#include "lira/learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lira::learn {

using ad::add;
using ad::constant;
using ad::detach;
using ad::grl;
using ad::mean_all;
using ad::mul;
using ad::neg;
using ad::sub;

Mode parse_mode(const std::string& s) {
    if (s == "nominal") return Mode::Nominal;
    if (s == "full") return Mode::Full;
    if (s == "proposal") return Mode::Proposal;
    if (s == "ablate_lira") return Mode::AblateLiRA;
    if (s == "ablate_rnf") return Mode::AblateRNF;
    if (s == "ablate_hrg") return Mode::AblateHRG;
    if (s == "ablate_mmb") return Mode::AblateMMB;
    throw std::invalid_argument("unknown mode: " + s);
}

std::string mode_name(Mode m) {
    switch (m) {
        case Mode::Nominal: return "nominal";
        case Mode::Full: return "full";
        case Mode::Proposal: return "proposal";
        case Mode::AblateLiRA: return "ablate_lira";
        case Mode::AblateRNF: return "ablate_rnf";
        case Mode::AblateHRG: return "ablate_hrg";
        case Mode::AblateMMB: return "ablate_mmb";
    }
    return "?";
}

MmbOut mmb(const Var& losses, const Var& gamma_param, bool ablate) {
    MmbOut o;
    o.l_mea = mean_all(losses);
    if (ablate || losses.value().size() < 2) {
        o.l_thetaphi = o.l_mea;
        return o;
    }
    o.l_mid = mul(add(ad::min_all(losses), ad::max_all(losses)), 0.5);
    const Var gdet = detach(gamma_param);
    o.l_thetaphi = add(mul(o.l_mid, gdet), mul(o.l_mea, sub(1.0, gdet)));
    o.l_gamma = mul(gamma_param, sub(detach(o.l_mea), detach(o.l_mid)));
    return o;
}

Var slack_loss(const Array& core_det, const Var& slack_live, const Array& lambda_det,
               double eps) {
    const int n = core_det.size();
    Array inside = Array::vec(n);
    Array outside = Array::vec(n);
    for (int i = 0; i < n; ++i) {
        const double delta = core_det[i] + slack_live.value()[i];
        if (std::abs(delta) <= eps) {
            inside[i] = 1.0;
        } else {
            outside[i] = 1.0;
        }
    }
    const Var branch_in = mul(mul(slack_live, constant(lambda_det)), constant(inside));
    const Var branch_out =
        mul(ad::abs_op(add(constant(core_det), slack_live)), constant(outside));
    return mean_all(add(branch_in, branch_out));
}

Learner::Learner(const LearnerConfig& cfg, Rng& rng) : cfg_(cfg), buffer_(cfg.buffer_capacity) {
    if (cfg_.mode == Mode::AblateRNF) cfg_.model.odd_flow = false;
    model_ = model::WorldModel(cfg_.model, rng);
    adversary_ = model::Adversary(cfg_.adversary, rng);

    nn::MlpSpec slack;
    slack.in = cfg_.model.state_dim;
    slack.hidden = cfg_.slack_hidden;
    slack.out = 1;
    slack.head = nn::Head::Positive;
    slack.name = "slack";
    slack_ = nn::Mlp(slack, rng);

    if (cfg_.lambda_state_dependent) {
        nn::MlpSpec lam;
        lam.in = cfg_.model.state_dim;
        lam.hidden = cfg_.lambda_hidden;
        lam.out = 1;
        lam.head = nn::Head::Bounded01;
        lam.name = "lambda_net";
        lambda_net_ = nn::Mlp(lam, rng);
    }

    lambda_ = ad::parameter(Array::scalar(cfg_.lambda_init), "lambda");
    gamma_ = ad::parameter(Array::scalar(cfg_.gamma_init), "gamma");

    prior_.sigma = 0.2 / 3.0;
    prior_.half_width = cfg_.adversary.d_max;
    prior_.dim = cfg_.adversary.dist_dim;

    const nn::AdamConfig oc{cfg_.lr, 0.9, 0.999, 1e-8};
    opt_theta_ = std::make_unique<nn::Adam>(model_.params(), oc);
    opt_phi_ = std::make_unique<nn::Adam>(adversary_.params(), oc);
    opt_eta_ = std::make_unique<nn::Adam>(slack_.params(), oc);
    if (cfg_.lambda_state_dependent) {
        opt_lambda_ = std::make_unique<nn::Adam>(lambda_net_.params(), oc);
    } else {
        opt_lambda_ = std::make_unique<nn::Adam>(std::vector<Var>{lambda_}, oc);
    }
    opt_gamma_ = std::make_unique<nn::Adam>(std::vector<Var>{gamma_}, oc);
}

bool Learner::lambda_auto() const {
    if (cfg_.lambda_fixed >= 0.0) return false;
    switch (cfg_.mode) {
        case Mode::Proposal:
        case Mode::AblateRNF:
        case Mode::AblateHRG:
        case Mode::AblateMMB:
            return true;
        default:
            return false;
    }
}

bool Learner::gamma_auto() const { return cfg_.mode != Mode::AblateMMB; }

bool Learner::adversary_trained() const { return cfg_.mode != Mode::Nominal; }

bool Learner::hrg_active() const {
    return cfg_.mode != Mode::Nominal && cfg_.mode != Mode::AblateHRG;
}

double Learner::beta_effective() const {
    if (cfg_.mode == Mode::Nominal || cfg_.mode == Mode::Full) return 0.0;
    return cfg_.lambda_state_dependent ? cfg_.beta_state : cfg_.beta;
}

double Learner::lambda_value() const {
    if (cfg_.lambda_fixed >= 0.0) return cfg_.lambda_fixed;
    switch (cfg_.mode) {
        case Mode::Nominal: return 1.0;
        case Mode::Full:
        case Mode::AblateLiRA: return 0.0;
        default: return lambda_.value()[0];
    }
}

Array Learner::lambda_per_sample(const Array& s) const {
    const int n = s.rows();
    if (cfg_.lambda_state_dependent && lambda_auto()) {
        const Array out = lambda_net_.forward_value(s);
        Array lam = Array::vec(n);
        for (int i = 0; i < n; ++i) lam[i] = out.at(i, 0);
        return lam;
    }
    return Array::vec(n, lambda_value());
}

Var Learner::lambda_live(const Var& s) const {
    if (cfg_.lambda_state_dependent) {
        const Var out = lambda_net_.forward(s);
        return ad::reshape(out, 1, out.value().rows(), 1);
    }
    return lambda_;
}

BatchLosses Learner::build_losses(const Array& s_in, const Array& a_in,
                                  const Array& d_in, const Array& x_in, Rng& rng) {
    Array s = s_in, a = a_in, d = d_in, x = x_in;
    BatchLosses out;

    Var lm, la, dhat;
    Var sC;
    while (true) {
        const int n = s.rows();
        if (n == 0) return out;  // nothing survived the finite filter
        sC = constant(s);
        const Var aC = constant(a);
        const Var xC = constant(x);
        const auto heads = model_.heads(sC, aC);
        lm = neg(model_.marg_log_prob(heads, xC));
        if (cfg_.mode == Mode::Nominal) {
            la = lm;  // adversary frozen at the prior; flow untouched
            dhat = Var{};
        } else if (hrg_active()) {
            dhat = adversary_.resample(d, s);
            la = neg(model_.aware_log_prob(heads, xC, grl(dhat)));
        } else {
            dhat = Var{};
            la = neg(model_.aware_log_prob(heads, xC, constant(d)));
        }

        std::vector<int> keep;
        keep.reserve(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            if (std::isfinite(lm.value()[i]) && std::isfinite(la.value()[i]))
                keep.push_back(i);
        if (static_cast<int>(keep.size()) == n) break;

        out.dropped += n - static_cast<long>(keep.size());
        Array s2 = Array::mat(static_cast<int>(keep.size()), s.cols());
        Array a2 = Array::mat(static_cast<int>(keep.size()), a.cols());
        Array d2 = Array::mat(static_cast<int>(keep.size()), d.cols());
        Array x2 = Array::mat(static_cast<int>(keep.size()), x.cols());
        for (size_t i = 0; i < keep.size(); ++i)
            for (int j = 0; j < s.cols(); ++j) s2.at(static_cast<int>(i), j) = s.at(keep[i], j);
        for (size_t i = 0; i < keep.size(); ++i)
            for (int j = 0; j < a.cols(); ++j) a2.at(static_cast<int>(i), j) = a.at(keep[i], j);
        for (size_t i = 0; i < keep.size(); ++i)
            for (int j = 0; j < d.cols(); ++j) d2.at(static_cast<int>(i), j) = d.at(keep[i], j);
        for (size_t i = 0; i < keep.size(); ++i)
            for (int j = 0; j < x.cols(); ++j) x2.at(static_cast<int>(i), j) = x.at(keep[i], j);
        s = s2; a = a2; d = d2; x = x2;
    }

    const int n = s.rows();
    out.used = n;
    out.lm_mean = mean_all(lm);
    out.la_mean = mean_all(la);

    out.lambda_det = lambda_per_sample(s);
    const Var lamC = constant(out.lambda_det);
    const Var l = add(mul(lm, lamC), mul(la, sub(1.0, lamC)));

    const auto mm = mmb(l, gamma_, cfg_.mode == Mode::AblateMMB);
    out.l_thetaphi = mm.l_thetaphi;
    out.l_gamma = mm.l_gamma;

    const double beta = beta_effective();
    if (adversary_trained() && beta != 0.0) {
        Var kl;
        if (hrg_active()) {
            // The divergence must be estimated at samples of the *current*
            // adversary, drawn fresh and re-attached through the hindsight
            // path. Reusing replayed disturbances here evaluates it under a
            // stale distribution, which lets the adversary collapse to a
            // point mass instead of contracting to the prior.
            Array dkl = Array::mat(n, cfg_.model.dist_dim);
            Array row = Array::mat(1, cfg_.model.state_dim);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < cfg_.model.state_dim; ++j) row[j] = s.at(i, j);
                const Array di = adversary_.sample(row, rng);
                for (int j = 0; j < cfg_.model.dist_dim; ++j) dkl.at(i, j) = di[j];
            }
            kl = adversary_.kl_mc(prior_, adversary_.resample(dkl, s), sC);
        } else {
            kl = adversary_.kl_mc(prior_, constant(d), sC);
        }
        out.l_phi = mul(kl, beta);
    }
    if (cfg_.mode == Mode::AblateHRG) {
        // Likelihood-ratio surrogate for the pathwise adversarial gradient:
        // score-weighted log-density with a batch-mean baseline.
        const Var logq = adversary_.log_prob(constant(d), sC);
        Array reward = Array::vec(n);
        double base = 0.0;
        for (int i = 0; i < n; ++i) base += la.value()[i];
        base /= static_cast<double>(n);
        for (int i = 0; i < n; ++i) reward[i] = la.value()[i] - base;
        const Var lr = neg(mean_all(mul(logq, constant(reward))));
        out.l_phi = out.l_phi.defined() ? add(out.l_phi, lr) : lr;
    }

    if (lambda_auto()) {
        const Var slack_out = slack_.forward(sC);
        const Var slack_vec = ad::reshape(slack_out, 1, n, 1);
        Array core = Array::vec(n);
        for (int i = 0; i < n; ++i)
            core[i] = lm.value()[i] - la.value()[i] - cfg_.rho;
        out.delta_det = Array::vec(n);
        for (int i = 0; i < n; ++i)
            out.delta_det[i] = core[i] + slack_vec.value()[i];
        out.l_lambda = neg(mean_all(mul(lambda_live(sC), constant(out.delta_det))));
        out.l_eta = slack_loss(core, slack_vec, out.lambda_det, cfg_.eps);
    }

    Var total = out.l_thetaphi;
    if (out.l_gamma.defined()) total = add(total, out.l_gamma);
    if (out.l_phi.defined()) total = add(total, out.l_phi);
    if (out.l_lambda.defined()) total = add(total, out.l_lambda);
    if (out.l_eta.defined()) total = add(total, out.l_eta);
    out.total = total;
    return out;
}

void Learner::apply_steps() {
    opt_theta_->step();
    if (adversary_trained()) opt_phi_->step();
    if (lambda_auto()) {
        opt_lambda_->step();
        if (!cfg_.lambda_state_dependent) {
            double& v = lambda_.mutable_value()[0];
            v = std::clamp(v, 0.0, 1.0);
        }
        opt_eta_->step();
    }
    if (gamma_auto()) {
        opt_gamma_->step();
        double& g = gamma_.mutable_value()[0];
        g = std::clamp(g, 0.0, 1.0);
    }
}

void Learner::train_batch(const Array& s, const Array& a, const Array& d,
                          const Array& x, Rng& rng) {
    BatchLosses bl = build_losses(s, a, d, x, rng);
    dropped_total_ += bl.dropped;
    if (bl.used == 0) return;
    ad::backward(bl.total);
    apply_steps();
}

void Learner::tune_lambda(const Array& delta_det) {
    const Var loss = neg(mean_all(mul(lambda_, constant(delta_det))));
    ad::backward(loss);
    opt_lambda_->step();
    double& v = lambda_.mutable_value()[0];
    v = std::clamp(v, 0.0, 1.0);
}

double Learner::collect_episode(env::Env& e, const plan::PlannerConfig& pcfg, Rng& rng) {
    ModelDynamics dyn(model_, e.state_dim(), e.action_dim(), e.reward_dim());
    const double lo = e.action_low();
    const double hi = e.action_high();
    const plan::PlannerPolicy init = plan::initial_policy(pcfg, e.action_dim(), lo, hi);

    Array s = e.reset(rng);
    plan::PlannerPolicy prev;
    bool have_prev = false;
    double ret = 0.0;
    int t = 0;
    while (true) {
        plan::PlannerPolicy pol = have_prev ? plan::warm_start(prev, init, pcfg) : init;
        auto pr = plan::plan(s, dyn, std::move(pol), pcfg, lo, hi, /*explore=*/true, rng);
        prev = std::move(pr.policy);
        have_prev = true;

        const Array d = adversary_trained() ? adversary_.sample(s, rng) : prior_.sample(rng);
        auto sr = e.step(s, pr.first_action, d, t, rng);

        replay::Transition tr;
        tr.s.assign(s.data(), s.data() + s.size());
        tr.a.assign(pr.first_action.data(), pr.first_action.data() + pr.first_action.size());
        tr.s_next.assign(sr.s_next.data(), sr.s_next.data() + sr.s_next.size());
        tr.r.assign(sr.r.data(), sr.r.data() + sr.r.size());
        tr.d.assign(d.data(), d.data() + d.size());
        buffer_.push(std::move(tr));

        ret += sr.r.sum();
        s = sr.s_next;
        ++t;
        if (sr.terminated || sr.truncated) break;
    }
    return ret;
}

EpochDiag Learner::train_epoch(Rng& rng) {
    EpochDiag diag;
    if (buffer_.size() == 0) return diag;

    const auto batches = buffer_.epoch_batches(cfg_.batch_size, rng);
    double wsum = 0.0;
    for (const auto& idx : batches) {
        Array s, a, d, x;
        buffer_.gather(idx, s, a, d, x);
        BatchLosses bl = build_losses(s, a, d, x, rng);
        dropped_total_ += bl.dropped;
        diag.dropped += bl.dropped;
        if (bl.used == 0) continue;
        ad::backward(bl.total);
        apply_steps();

        const double w = static_cast<double>(bl.used);
        diag.loss_m += w * bl.lm_mean.value()[0];
        diag.loss_a += w * bl.la_mean.value()[0];
        double lam_mean = 0.0;
        for (int i = 0; i < bl.lambda_det.size(); ++i) lam_mean += bl.lambda_det[i];
        diag.lambda_mean += w * (lam_mean / static_cast<double>(bl.lambda_det.size()));
        wsum += w;
        ++diag.batches;
    }
    if (wsum > 0.0) {
        diag.loss_m /= wsum;
        diag.loss_a /= wsum;
        diag.lambda_mean /= wsum;
        diag.gap = diag.loss_m - diag.loss_a;
    }
    diag.gamma = gamma_value();
    Rng srng = rng.fork(0x5ca1eull);
    diag.adv_scale = adversary_scale(srng);
    return diag;
}

double Learner::adversary_scale(Rng& rng) const {
    if (!adversary_trained()) return prior_.sigma;
    const int take = std::min(4, buffer_.size());
    if (take == 0) return 0.0;
    Array states = Array::mat(take, cfg_.model.state_dim);
    for (int i = 0; i < take; ++i) {
        const auto& t = buffer_[buffer_.size() - 1 - i];
        for (int j = 0; j < cfg_.model.state_dim; ++j)
            states.at(i, j) = t.s[static_cast<size_t>(j)];
    }
    return adversary_.sample_std(states, 8, rng);
}

void ModelDynamics::predict_mean(const Array& s, const Array& a, Array& s_next,
                                 Array& r) const {
    const int n = s.rows();
    Array sa = Array::mat(n, sd_ + adim_);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < sd_; ++j) sa.at(i, j) = s.at(i, j);
        for (int j = 0; j < adim_; ++j) sa.at(i, sd_ + j) = a.at(i, j);
    }
    Array loc, scale;
    m_.predict_value(sa, loc, scale);
    s_next = Array::mat(n, sd_);
    r = Array::mat(n, rd_);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < sd_; ++j) s_next.at(i, j) = loc.at(i, j);
        for (int j = 0; j < rd_; ++j) r.at(i, j) = loc.at(i, sd_ + j);
    }
}

} // namespace lira::learn
