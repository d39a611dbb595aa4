// pybind11 module exposing the main operations: simulators, level-2 lifts,
// p-variation, limit predictions and the Monte-Carlo estimators.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "roughwalk/homog.hpp"
#include "roughwalk/io.hpp"
#include "roughwalk/mc.hpp"
#include "roughwalk/pvar.hpp"
#include "roughwalk/rde.hpp"

namespace py = pybind11;
using namespace roughwalk;

namespace {

std::vector<std::vector<double>> mat_rows(const Mat& m) {
    std::vector<std::vector<double>> rows(static_cast<size_t>(m.d));
    for (int i = 0; i < m.d; ++i)
        for (int j = 0; j < m.d; ++j) rows[static_cast<size_t>(i)].push_back(m(i, j));
    return rows;
}

Mat mat_of(const std::vector<std::vector<double>>& rows) {
    Mat m(static_cast<int>(rows.size()));
    for (int i = 0; i < m.d; ++i) {
        if (static_cast<int>(rows[static_cast<size_t>(i)].size()) != m.d)
            throw std::invalid_argument("matrix rows must be square");
        for (int j = 0; j < m.d; ++j) m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
    return m;
}

ConductanceLaw law_from_dict(const py::dict& d) {
    json j;
    for (const auto& item : d) {
        const std::string key = py::str(item.first);
        if (py::isinstance<py::str>(item.second))
            j[key] = item.second.cast<std::string>();
        else
            j[key] = item.second.cast<double>();
    }
    return law_from_json(j);
}

ModelConfig model_from_dict(const py::dict& d) {
    json j;
    for (const auto& item : d) {
        const std::string key = py::str(item.first);
        if (py::isinstance<py::dict>(item.second)) {
            json sub;
            for (const auto& inner : item.second.cast<py::dict>())
                sub[std::string(py::str(inner.first))] =
                    py::isinstance<py::str>(inner.second)
                        ? json(inner.second.cast<std::string>())
                        : json(inner.second.cast<double>());
            j[key] = sub;
        } else if (py::isinstance<py::str>(item.second)) {
            j[key] = item.second.cast<std::string>();
        } else {
            j[key] = item.second.cast<double>();
        }
    }
    return model_from_json(j);
}

py::dict report_dict(const EstimatorReport& rep) {
    py::dict d;
    d["statistic"] = rep.statistic;
    d["mean"] = mat_rows(rep.mean);
    d["stderr"] = mat_rows(rep.stderr_entry);
    d["replicas"] = rep.replicas;
    d["scale_n"] = rep.scale_n;
    d["seed"] = rep.seed;
    d["wall_seconds"] = rep.wall_seconds;
    return d;
}

py::dict prediction_dict(const RoughLimitPrediction& pred) {
    py::dict d;
    d["covariance"] = mat_rows(pred.covariance);
    d["gamma_strato"] = mat_rows(pred.gamma_strato);
    d["ito_correction"] = mat_rows(pred.ito_correction);
    d["gap_prediction"] = mat_rows(pred.gap_prediction);
    d["residual"] = pred.residual;
    return d;
}

}  // namespace

PYBIND11_MODULE(roughwalk, m) {
    m.doc() = "rough-path scaling limits of additive functionals of Markov processes";

    py::class_<JumpPath>(m, "JumpPath")
        .def(py::init<>())
        .def_readwrite("d", &JumpPath::d)
        .def_readwrite("horizon", &JumpPath::horizon)
        .def_readwrite("start", &JumpPath::start)
        .def_readwrite("times", &JumpPath::times)
        .def_readwrite("increments", &JumpPath::increments)
        .def("value_at", &JumpPath::value_at)
        .def("final_value", &JumpPath::final_value)
        .def("njumps", &JumpPath::njumps);

    py::class_<SampledPath>(m, "SampledPath")
        .def(py::init<>())
        .def_readwrite("d", &SampledPath::d)
        .def_readwrite("times", &SampledPath::times)
        .def_readwrite("values", &SampledPath::values)
        .def("npoints", &SampledPath::npoints)
        .def_property(
            "piecewise_linear",
            [](const SampledPath& p) { return p.interp == Interp::PiecewiseLinear; },
            [](SampledPath& p, bool lin) {
                p.interp = lin ? Interp::PiecewiseLinear : Interp::GridSamples;
            });

    py::class_<Level2Lift>(m, "Level2Lift")
        .def_readonly("d", &Level2Lift::d)
        .def_readonly("times", &Level2Lift::times)
        .def_readonly("values", &Level2Lift::values)
        .def("npoints", &Level2Lift::npoints)
        .def("area_at", [](const Level2Lift& l, size_t k) { return mat_rows(l.area_at(k)); })
        .def("final_area", [](const Level2Lift& l) { return mat_rows(l.area_at(l.npoints() - 1)); });

    m.def("ito_lift_jump", &ito_lift_jump);
    m.def("strato_lift_linear", &strato_lift_linear);
    m.def("ito_lift_sampled", &ito_lift_sampled);
    m.def("interpolate", &interpolate);
    m.def(
        "diffusive_rescale",
        [](const JumpPath& p, double n, double target) { return diffusive_rescale(p, n, target); },
        py::arg("path"), py::arg("n"), py::arg("target_horizon") = 0.0);
    m.def(
        "interpolation_gap",
        [](const JumpPath& p) {
            const GapSeries g = interpolation_gap(p);
            std::vector<std::pair<double, std::vector<std::vector<double>>>> out;
            for (size_t k = 0; k < g.times.size(); ++k) out.emplace_back(g.times[k], mat_rows(g.at(k)));
            return out;
        },
        "running value of half the sum of squared jumps, per jump time");
    m.def(
        "chen_reconstruct",
        [](const Level2Lift& lift, double s, double t) { return mat_rows(chen_reconstruct(lift, s, t)); },
        py::arg("lift"), py::arg("s"), py::arg("t"));

    m.def(
        "pvar",
        [](const std::vector<double>& values, int d, double p, const std::string& method) {
            const PvarResult res = method == "brute" ? pvar_bruteforce(values, d, p)
                                                     : pvar_grid_dp(values, d, p);
            py::dict out;
            out["value"] = res.value;
            out["partition"] = res.partition;
            out["method"] = method == "brute" ? "brute-force" : "dp-exact";
            return out;
        },
        py::arg("values"), py::arg("d"), py::arg("p"), py::arg("method") = "dp",
        "exact p-variation over grid points (flat row-major values)");
    m.def("pvar_area", [](const Level2Lift& lift, double q) {
        const PvarResult res = pvar_area(lift, q);
        py::dict out;
        out["value"] = res.value;
        out["partition"] = res.partition;
        return out;
    });
    m.def("rough_norm", &rough_norm);
    m.def("lepingle_ratio", &lepingle_ratio);
    m.def("dyadic_skeleton",
          [](const JumpPath& p, int level) { return dyadic_skeleton(p, level); });

    m.def(
        "simulate_conductance_walk",
        [](const py::dict& law, int d, double horizon, uint64_t seed) {
            const ConductanceLaw parsed = law_from_dict(law);
            ConductanceEnvironment env(d, parsed, mix64(seed, 0xE417u));
            Rng rng(seed);
            return simulate_conductance_walk(env, horizon, rng);
        },
        py::arg("law"), py::arg("d"), py::arg("horizon"), py::arg("seed"));
    m.def(
        "simulate_ou",
        [](double micro_horizon, double step, uint64_t seed) {
            Rng rng(seed);
            return simulate_ou(micro_horizon, step, rng);
        },
        py::arg("micro_horizon"), py::arg("step"), py::arg("seed"));
    m.def(
        "additive_functional",
        [](const SampledPath& micro, double n) {
            return additive_functional(
                micro, n,
                [](const double* x, double* out) {
                    out[0] = x[0];
                    out[1] = x[1];
                },
                2);
        },
        py::arg("micro"), py::arg("n"), "Z^n for the coordinate observable F(x) = x (d = 2)");

    m.def("ou_predict", [] { return prediction_dict(ou_predict()); });
    m.def(
        "conductance_predict",
        [](const py::dict& law, const std::vector<std::vector<double>>& cov) {
            return prediction_dict(conductance_predict(law_from_dict(law), mat_of(cov)));
        },
        py::arg("law"), py::arg("empirical_covariance"));
    m.def(
        "periodic_predict",
        [](const std::string& preset, double kappa, int K) {
            PeriodicCoefficients coeffs;
            if (preset == "identity")
                coeffs = PeriodicCoefficients::identity(2);
            else if (preset == "antisym_sin")
                coeffs = PeriodicCoefficients::antisym_sin2(kappa);
            else if (preset == "d1_cosine")
                coeffs = PeriodicCoefficients::d1_cosine(1.0, kappa);
            else
                throw std::invalid_argument("unknown preset '" + preset + "'");
            return prediction_dict(periodic_predict_spectral(coeffs, K));
        },
        py::arg("preset"), py::arg("kappa") = 0.5, py::arg("K") = 32);

    m.def(
        "estimate",
        [](const py::dict& model, const std::string& statistic, double n, int replicas, uint64_t seed,
           int workers) {
            BatchOptions opts;
            opts.n = n;
            opts.replicas = replicas;
            opts.seed = seed;
            opts.workers = workers;
            return report_dict(run_batch(model_from_dict(model), opts).report(statistic));
        },
        py::arg("model"), py::arg("statistic"), py::arg("n"), py::arg("replicas"), py::arg("seed"),
        py::arg("workers") = 0);
}
