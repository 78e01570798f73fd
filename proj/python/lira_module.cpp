// Python bindings for the lira core library.
//
// Exposes the pieces a notebook user actually touches: environments,
// disturbance generators, robust-score statistics, config handling, and the
// train/eval harness entry points.  Heavy lifting stays in C++; the bindings
// convert between the dense Array type and python lists at the boundary.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <vector>

#include "lira/array.hpp"
#include "lira/config.hpp"
#include "lira/env.hpp"
#include "lira/harness.hpp"
#include "lira/learner.hpp"
#include "lira/noise.hpp"
#include "lira/rng.hpp"
#include "lira/stats.hpp"

namespace py = pybind11;

namespace {

using lira::Rng;
using lira::ad::Array;

std::vector<double> to_vec(const Array& a) {
    return std::vector<double>(a.data(), a.data() + a.size());
}

// Thin owner so python can hold an environment plus a seeded stream together.
struct PyEnv {
    std::unique_ptr<lira::env::Env> env;
    Rng rng;

    PyEnv(const std::string& name, int chain_joints, int t_max, std::uint64_t seed)
        : env(lira::env::make_env(name, chain_joints, t_max)), rng(seed) {}

    std::vector<double> reset() { return to_vec(env->reset(rng)); }

    py::tuple step(const std::vector<double>& state, const std::vector<double>& action,
                   const std::vector<double>& disturbance, int t) {
        lira::env::StepResult r =
            env->step(Array::from(state), Array::from(action), Array::from(disturbance),
                      t, rng);
        return py::make_tuple(to_vec(r.s_next), to_vec(r.r), r.terminated, r.truncated);
    }
};

struct PyNoise {
    lira::noise::NoiseGen gen;
    Rng rng;

    static lira::noise::NoiseGen::Params params(const std::string& kind, int dim,
                                                int t_max, double sigma0, double d_max) {
        lira::noise::NoiseGen::Params p;
        p.kind = lira::noise::parse_kind(kind);
        p.dim = dim;
        p.t_max = t_max;
        p.sigma0 = sigma0;
        p.d_max = d_max;
        return p;
    }

    PyNoise(const std::string& kind, int dim, int t_max, double sigma0, double d_max,
            std::uint64_t seed)
        : gen(params(kind, dim, t_max, sigma0, d_max)), rng(seed) {}

    void reset() { gen.reset(rng); }
    std::vector<double> emit(int t) { return to_vec(gen.emit(t, rng)); }
};

}  // namespace

PYBIND11_MODULE(_lira, m) {
    m.doc() = "Robust world-model learning with an auto-tuned adversary";

    py::class_<PyEnv>(m, "Env")
        .def(py::init<const std::string&, int, int, std::uint64_t>(), py::arg("name"),
             py::arg("chain_joints") = 6, py::arg("t_max") = 0, py::arg("seed") = 0)
        .def_property_readonly("name", [](const PyEnv& e) { return e.env->name(); })
        .def_property_readonly("state_dim",
                               [](const PyEnv& e) { return e.env->state_dim(); })
        .def_property_readonly("action_dim",
                               [](const PyEnv& e) { return e.env->action_dim(); })
        .def_property_readonly("reward_dim",
                               [](const PyEnv& e) { return e.env->reward_dim(); })
        .def_property_readonly("disturbance_dim",
                               [](const PyEnv& e) { return e.env->dist_dim(); })
        .def_property_readonly("t_max", [](const PyEnv& e) { return e.env->t_max(); })
        .def_property_readonly("action_low",
                               [](const PyEnv& e) { return e.env->action_low(); })
        .def_property_readonly("action_high",
                               [](const PyEnv& e) { return e.env->action_high(); })
        .def("reset", &PyEnv::reset)
        .def("step", &PyEnv::step, py::arg("state"), py::arg("action"),
             py::arg("disturbance"), py::arg("t"));

    py::class_<PyNoise>(m, "NoiseGen")
        .def(py::init<const std::string&, int, int, double, double, std::uint64_t>(),
             py::arg("kind"), py::arg("dim"), py::arg("t_max") = 500,
             py::arg("sigma0") = 0.2 / 3.0, py::arg("d_max") = 1.0, py::arg("seed") = 0)
        .def("reset", &PyNoise::reset)
        .def("emit", &PyNoise::emit, py::arg("t"));

    m.def("iqm", &lira::stats::iqm, py::arg("values"),
          "Interquartile mean: drop floor(n/4) lowest and highest, average the rest.");

    m.def(
        "aggregate_models",
        [](const std::vector<double>& scores) {
            lira::stats::Aggregate a = lira::stats::aggregate_models(scores);
            return py::make_tuple(a.mean, a.ci_half, a.kept);
        },
        py::arg("scores"),
        "Robust cross-model aggregate: (mean, 95% half-width, kept count).");

    m.def("combined_metric", &lira::stats::combined_metric, py::arg("noise_scores"),
          py::arg("global_best_nominal"), py::arg("method_best_nominal"),
          "Combined robustness metric over per-noise scores (index 0 = nominal).");

    m.def(
        "default_config",
        [](const std::string& env, const std::string& mode) {
            lira::config::ExperimentConfig cfg;
            cfg.env = env;
            cfg.mode = lira::learn::parse_mode(mode);
            return cfg.serialize();
        },
        py::arg("env") = "point_mass_push", py::arg("mode") = "proposal",
        "Render the default experiment configuration as an INI string.");

    m.def(
        "train",
        [](const std::string& config_path, std::uint64_t seed, const std::string& out_dir,
           int episodes) {
            lira::config::ExperimentConfig cfg =
                lira::config::ExperimentConfig::load(config_path);
            cfg.seed = seed;
            if (episodes > 0) cfg.episodes = episodes;
            const std::string out = lira::harness::resolve_out_dir(cfg, out_dir);
            lira::harness::TrainResult r = lira::harness::run_training(cfg, out);
            py::dict d;
            d["returns"] = r.returns;
            d["gaps"] = r.gaps;
            d["lambdas"] = r.lambdas;
            d["checkpoint"] = r.checkpoint_path;
            return d;
        },
        py::arg("config_path"), py::arg("seed") = 0, py::arg("out_dir") = "",
        py::arg("episodes") = -1,
        "Train a model from an INI config; returns per-episode curves and the "
        "checkpoint path.");

    m.def(
        "evaluate",
        [](const std::string& checkpoint_path, const std::string& disturbance, int trials,
           std::uint64_t seed) {
            lira::harness::EvalResult r = lira::harness::run_eval(
                checkpoint_path, lira::noise::parse_kind(disturbance), trials, seed,
                /*out_csv=*/"");
            py::dict d;
            d["returns"] = r.returns;
            d["iqm"] = r.iqm;
            return d;
        },
        py::arg("checkpoint_path"), py::arg("disturbance") = "nominal",
        py::arg("trials") = 30, py::arg("seed") = 0,
        "Evaluate a saved checkpoint under a disturbance kind; returns per-trial "
        "returns and their interquartile mean.");
}
