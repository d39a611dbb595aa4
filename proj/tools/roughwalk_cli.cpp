// roughwalk command line: simulate | lift | pvar | predict | estimate |
// sweep | rde | plotdata. Configs and reports are JSON, bulk numerics CSV.
// Exit codes: 0 success, 1 validation error, 2 numerical failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "roughwalk/io.hpp"
#include "roughwalk/pvar.hpp"
#include "roughwalk/rde.hpp"

namespace fs = std::filesystem;
using namespace roughwalk;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Ctx {
    std::string config_path;
    std::string out_dir = ".";
    uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;
    int replicas_override = 0;
    json config;
    json manifest_outputs = json::array();
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    json load_config() {
        if (config_path.empty()) throw std::invalid_argument("missing required flag '--config'");
        std::ifstream in(config_path);
        if (!in) throw std::invalid_argument("cannot open config file '" + config_path + "'");
        try {
            in >> config;
        } catch (const json::exception& e) {
            throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
        }
        return config;
    }

    uint64_t effective_seed() { return seed_set ? seed : json_seed_or(config, 0); }

    std::ofstream open_output(const std::string& name) {
        fs::create_directories(out_dir);
        const fs::path p = fs::path(out_dir) / name;
        std::ofstream os(p);
        if (!os) throw std::runtime_error("cannot write output file " + p.string());
        manifest_outputs.push_back(p.string());
        return os;
    }

    void write_manifest(const std::string& command) {
        json manifest{{"command", command},
                      {"version", kVersion},
                      {"config", config},
                      {"seed", effective_seed()},
                      {"workers", workers},
                      {"wall_seconds",
                       std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
                      {"outputs", manifest_outputs}};
        auto os = open_output("manifest.json");
        os << manifest.dump(2) << "\n";
    }
};

BatchOptions batch_options(Ctx& ctx, const json& cfg) {
    BatchOptions o;
    o.T = json_number_or(cfg, "horizon", 1.0);
    o.n = json_number_or(cfg, "scale_n", 1.0);
    o.replicas = ctx.replicas_override > 0 ? ctx.replicas_override
                                            : static_cast<int>(json_number_or(cfg, "M", 1000));
    o.seed = ctx.effective_seed();
    o.workers = ctx.workers;
    if (!(o.T > 0.0)) throw std::invalid_argument("field 'horizon': must be positive");
    if (!(o.n > 0.0)) throw std::invalid_argument("field 'scale_n': must be positive");
    if (o.replicas < 2) throw std::invalid_argument("field 'M': need at least 2 replicas");
    return o;
}

int cmd_simulate(Ctx& ctx) {
    const json cfg = ctx.load_config();
    const ModelConfig model = model_from_json(cfg);
    const double T = json_number_or(cfg, "horizon", 1.0);
    const double n = json_number_or(cfg, "scale_n", 1.0);
    if (!(T > 0.0)) throw std::invalid_argument("field 'horizon': must be positive");
    if (!(n > 0.0)) throw std::invalid_argument("field 'scale_n': must be positive");
    Rng rng(ctx.effective_seed());
    if (const auto* cm = std::get_if<ConductanceModel>(&model)) {
        ConductanceEnvironment env(cm->d, cm->law, mix64(ctx.effective_seed(), 0xE417u));
        const JumpPath micro = simulate_conductance_walk(env, n * T, rng);
        auto os = ctx.open_output("path_micro.csv");
        write_jump_csv(os, micro);
        auto om = ctx.open_output("path_macro.csv");
        write_jump_csv(om, diffusive_rescale(micro, n, T));
    } else if (const auto* ou = std::get_if<OuModel>(&model)) {
        const SampledPath micro = simulate_ou(n * T, ou->step, rng);
        auto os = ctx.open_output("path_micro.csv");
        write_sampled_csv(os, micro);
        const SampledPath z = additive_functional(
            micro, n,
            [](const double* x, double* out) {
                out[0] = x[0];
                out[1] = x[1];
            },
            2);
        auto oz = ctx.open_output("path_macro.csv");
        write_sampled_csv(oz, z);
    } else {
        const auto& pm = std::get<PeriodicModel>(model);
        if (pm.coeffs.max_drift_bound() * pm.step > 0.1)
            std::cerr << "warning: drift bound * step = " << pm.coeffs.max_drift_bound() * pm.step
                      << " is not small; consider a finer step\n";
        const SampledPath micro = simulate_periodic_diffusion(pm.coeffs, n * T, pm.step, rng);
        auto os = ctx.open_output("path_micro.csv");
        write_sampled_csv(os, micro);
        auto om = ctx.open_output("path_macro.csv");
        write_sampled_csv(om, diffusive_rescale(micro, n, T));
    }
    ctx.write_manifest("simulate");
    return 0;
}

ParsedPath load_path(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot open path file '" + file + "'");
    return read_path_csv(in);
}

int cmd_lift(Ctx& ctx, const std::string& path_file, const std::string& kind) {
    ctx.config = json{{"path", path_file}, {"kind", kind}};
    const ParsedPath parsed = load_path(path_file);
    Level2Lift lift;
    if (kind == "ito") {
        lift = parsed.is_jump ? ito_lift_jump(parsed.jump) : ito_lift_sampled(parsed.sampled);
    } else if (kind == "strato") {
        lift = parsed.is_jump ? strato_lift_linear(interpolate(parsed.jump))
                              : strato_lift_linear(parsed.sampled);
    } else {
        throw std::invalid_argument("flag '--kind': expected ito or strato");
    }
    auto os = ctx.open_output("lift.csv");
    write_lift_csv(os, lift, parsed.is_jump);
    ctx.write_manifest("lift");
    return 0;
}

int cmd_pvar(Ctx& ctx, const std::string& path_file, double p, const std::string& method,
             bool level2, int dyadic_level) {
    ctx.config = json{{"path", path_file}, {"p", p}, {"method", method}, {"level2", level2}};
    const ParsedPath parsed = load_path(path_file);
    PvarResult res;
    if (level2) {
        const Level2Lift lift = parsed.is_jump ? ito_lift_jump(parsed.jump)
                                               : strato_lift_linear(parsed.sampled);
        res = method == "brute" ? pvar_area_bruteforce(lift, 0.5 * p) : pvar_area(lift, 0.5 * p);
    } else {
        std::vector<double> values;
        int d = 0;
        if (parsed.is_jump) {
            values = event_values(parsed.jump);
            d = parsed.jump.d;
        } else {
            values = parsed.sampled.values;
            d = parsed.sampled.d;
        }
        if (method == "dp") {
            res = pvar_grid_dp(values, d, p);
        } else if (method == "brute") {
            res = pvar_bruteforce(values, d, p);
        } else if (method == "dyadic") {
            const JumpPath skel = parsed.is_jump ? dyadic_skeleton(parsed.jump, dyadic_level)
                                                 : dyadic_skeleton(parsed.sampled, dyadic_level);
            res = pvar_grid_dp(event_values(skel), d, p);
            res.method = PvarMethod::DyadicLower;
        } else {
            throw std::invalid_argument("flag '--method': expected dp, brute or dyadic");
        }
    }
    const char* mname = res.method == PvarMethod::DpExact
                            ? "dp-exact"
                            : (res.method == PvarMethod::BruteForce ? "brute-force" : "dyadic-lower");
    const json out{{"value", res.value}, {"partition", res.partition}, {"method", mname}};
    auto os = ctx.open_output("pvar.json");
    os << out.dump(2) << "\n";
    std::cout << out.dump(2) << "\n";
    ctx.write_manifest("pvar");
    return 0;
}

int cmd_predict(Ctx& ctx) {
    const json cfg = ctx.load_config();
    const ModelConfig model = model_from_json(cfg);
    RoughLimitPrediction pred;
    if (std::holds_alternative<OuModel>(model)) {
        pred = ou_predict();
    } else if (const auto* cm = std::get_if<ConductanceModel>(&model)) {
        if (!cfg.contains("covariance"))
            throw std::invalid_argument(
                "missing field 'covariance': the conductance prediction consumes an empirical "
                "covariance (run 'estimate' with statistic covariance first)");
        pred = conductance_predict(cm->law, mat_from_json(cfg["covariance"], "covariance"));
    } else {
        const auto& pm = std::get<PeriodicModel>(model);
        pred = periodic_predict_spectral(pm.coeffs, pm.K);
    }
    const json out = prediction_to_json(pred);
    auto os = ctx.open_output("prediction.json");
    os << out.dump(2) << "\n";
    std::cout << out.dump(2) << "\n";
    ctx.write_manifest("predict");
    return 0;
}

int cmd_estimate(Ctx& ctx) {
    const json cfg = ctx.load_config();
    const ModelConfig model = model_from_json(cfg);
    const BatchOptions opts = batch_options(ctx, cfg);
    const std::string statistic = cfg.contains("statistic") ? cfg["statistic"].get<std::string>()
                                                            : std::string("covariance");
    if (statistic == "gap" && !std::holds_alternative<ConductanceModel>(model))
        throw std::invalid_argument("field 'statistic': gap is defined for the conductance model only");
    const BatchStats stats = run_batch(model, opts);
    const EstimatorReport rep = stats.report(statistic);
    auto os = ctx.open_output("report.json");
    os << report_to_json(rep).dump(2) << "\n";
    auto oc = ctx.open_output("report.csv");
    write_report_csv(oc, rep);
    std::cout << report_to_json(rep).dump(2) << "\n";
    ctx.write_manifest("estimate");
    return 0;
}

Mat default_target(const ModelConfig& model, const std::string& statistic) {
    if (std::holds_alternative<OuModel>(model)) {
        const RoughLimitPrediction pred = ou_predict();
        if (statistic == "covariance") return pred.covariance;
        if (statistic == "gamma_hat") return pred.gamma_strato;
        if (statistic == "level2_strato" || statistic == "level2_ito")
            return 0.5 * pred.covariance + pred.gamma_strato;
    }
    if (const auto* cm = std::get_if<ConductanceModel>(&model)) {
        if (statistic == "gap") return cm->law.mean() * Mat::identity(cm->d);
        if (statistic == "gamma_hat") return Mat::zero(cm->d);
    }
    if (const auto* pm = std::get_if<PeriodicModel>(&model)) {
        const RoughLimitPrediction pred = periodic_predict_spectral(pm->coeffs, pm->K);
        if (statistic == "covariance") return pred.covariance;
        if (statistic == "gamma_hat") return pred.gamma_strato;
        if (statistic == "level2_strato") return 0.5 * pred.covariance + pred.gamma_strato;
        if (statistic == "level2_ito") return pred.ito_correction;
        if (statistic == "gap") return pred.gap_prediction;
    }
    throw std::invalid_argument("field 'target': required (no default for this model/statistic)");
}

int cmd_sweep(Ctx& ctx) {
    const json cfg = ctx.load_config();
    const ModelConfig model = model_from_json(cfg);
    if (!cfg.contains("n_values") || !cfg["n_values"].is_array())
        throw std::invalid_argument("missing array field 'n_values'");
    std::vector<double> n_values;
    for (const auto& v : cfg["n_values"]) n_values.push_back(v.get<double>());
    const int replicas = ctx.replicas_override > 0
                             ? ctx.replicas_override
                             : static_cast<int>(json_number_or(cfg, "M", 1000));
    const std::string kind = cfg.contains("sweep_kind") ? cfg["sweep_kind"].get<std::string>()
                                                        : std::string("estimate");

    if (kind == "tightness") {
        const double p = json_number_or(cfg, "p", 2.5);
        const TightnessProbe probe =
            pvar_tightness_probe(model, p, n_values, replicas, ctx.effective_seed(), ctx.workers);
        auto os = ctx.open_output("probe.json");
        os << probe_to_json(probe).dump(2) << "\n";
        auto oc = ctx.open_output("probe.csv");
        oc << "n,q50,q90,q99\n";
        for (const auto& row : probe.rows)
            oc << row.n << "," << row.q50 << "," << row.q90 << "," << row.q99 << "\n";
        std::cout << probe_to_json(probe).dump(2) << "\n";
        ctx.write_manifest("sweep");
        return 0;
    }

    const std::string statistic = cfg.contains("statistic") ? cfg["statistic"].get<std::string>()
                                                            : std::string("covariance");
    const Mat target = cfg.contains("target") ? mat_from_json(cfg["target"], "target")
                                              : default_target(model, statistic);
    const ConvergenceSweep sweep =
        convergence_sweep(model, statistic, target, n_values, replicas, ctx.effective_seed(), ctx.workers);
    auto os = ctx.open_output("sweep.json");
    os << sweep_to_json(sweep).dump(2) << "\n";
    auto oc = ctx.open_output("sweep.csv");
    bool header = true;
    for (const auto& pt : sweep.points) {
        write_report_csv(oc, pt.report, header);
        header = false;
    }
    std::cout << sweep_to_json(sweep).dump(2) << "\n";
    ctx.write_manifest("sweep");
    return 0;
}

int cmd_rde(Ctx& ctx) {
    const json cfg = ctx.load_config();
    const ModelConfig model = model_from_json(cfg);
    const auto* cm = std::get_if<ConductanceModel>(&model);
    if (!cm) throw std::invalid_argument("field 'model': the rde comparison ships for the conductance model");
    const BatchOptions opts = batch_options(ctx, cfg);
    Vec c{0.5, 0.5}, y0{1.0, 1.0};
    if (cfg.contains("sigma_c")) {
        c.clear();
        for (const auto& v : cfg["sigma_c"]) c.push_back(v.get<double>());
    }
    if (cfg.contains("y0")) {
        y0.clear();
        for (const auto& v : cfg["y0"]) y0.push_back(v.get<double>());
    }
    if (static_cast<int>(c.size()) != cm->d || static_cast<int>(y0.size()) != cm->d)
        throw std::invalid_argument("field 'sigma_c'/'y0': dimension mismatch with the model");
    const double limit_step = json_number_or(cfg, "limit_step", 1e-3);
    const VectorField field = VectorField::linear(c);

    const int m = opts.replicas;
    std::vector<double> driver(static_cast<size_t>(m) * cm->d, 0.0);
    std::vector<double> xx(static_cast<size_t>(m) * cm->d * cm->d, 0.0);
    parallel_for(m, ctx.workers, [&](int r) {
        Rng rng(replica_seed(opts.seed, static_cast<uint64_t>(r)));
        ConductanceEnvironment env(cm->d, cm->law,
                                   mix64(replica_seed(opts.seed, static_cast<uint64_t>(r)), 0xE417u));
        const JumpPath micro = simulate_conductance_walk(env, opts.n * opts.T, rng);
        const JumpPath macro = diffusive_rescale(micro, opts.n, opts.T);
        const SampledPath y = euler_driven(macro, field, y0);
        const size_t last = y.npoints() - 1;
        for (int i = 0; i < cm->d; ++i)
            driver[static_cast<size_t>(r) * cm->d + i] = y.values[last * cm->d + i];
        const Vec xT = macro.final_value();
        for (int i = 0; i < cm->d; ++i)
            for (int j = 0; j < cm->d; ++j)
                xx[(static_cast<size_t>(r) * cm->d + i) * cm->d + j] = xT[i] * xT[j];
    });
    Mat cov_hat(cm->d);
    for (int r = 0; r < m; ++r)
        for (size_t i = 0; i < cov_hat.a.size(); ++i)
            cov_hat.a[i] += xx[static_cast<size_t>(r) * cov_hat.a.size() + i] / m;
    const RoughLimitPrediction pred = conductance_predict(cm->law, cov_hat);

    auto limit_samples = [&](const Mat& gamma, uint64_t seed_shift) {
        std::vector<double> out(static_cast<size_t>(m) * cm->d, 0.0);
        parallel_for(m, ctx.workers, [&](int r) {
            Rng rng(replica_seed(opts.seed + seed_shift, static_cast<uint64_t>(r)));
            const SampledPath y =
                euler_corrected_limit(field, cov_hat, gamma, y0, opts.T, limit_step, rng);
            const size_t last = y.npoints() - 1;
            for (int i = 0; i < cm->d; ++i)
                out[static_cast<size_t>(r) * cm->d + i] = y.values[last * cm->d + i];
        });
        return out;
    };
    const std::vector<double> corrected = limit_samples(pred.ito_correction, 1);
    const std::vector<double> uncorrected = limit_samples(Mat::zero(cm->d), 2);

    const json out{{"covariance_hat", mat_to_json(cov_hat)},
                   {"gamma_ito", mat_to_json(pred.ito_correction)},
                   {"corrected", compare_to_json(compare_laws(driver, corrected, cm->d))},
                   {"uncorrected", compare_to_json(compare_laws(driver, uncorrected, cm->d))}};
    auto os = ctx.open_output("rde.json");
    os << out.dump(2) << "\n";
    auto write_samples = [&](const char* name, const std::vector<double>& buf) {
        auto oc = ctx.open_output(name);
        oc << "replica";
        for (int i = 1; i <= cm->d; ++i) oc << ",y" << i;
        oc << "\n";
        for (int r = 0; r < m; ++r) {
            oc << r;
            for (int i = 0; i < cm->d; ++i) oc << "," << buf[static_cast<size_t>(r) * cm->d + i];
            oc << "\n";
        }
    };
    write_samples("samples_driver.csv", driver);
    write_samples("samples_corrected.csv", corrected);
    write_samples("samples_uncorrected.csv", uncorrected);
    std::cout << out.dump(2) << "\n";
    ctx.write_manifest("rde");
    return 0;
}

int cmd_plotdata(Ctx& ctx, const std::vector<std::string>& reports) {
    struct Row {
        std::string statistic;
        double n;
        int i, j;
        double mean, se;
        int m;
        uint64_t seed;
    };
    std::vector<Row> rows;
    auto ingest_report = [&](const json& j) {
        const Mat mean = mat_from_json(j.at("mean"), "mean");
        const Mat se = mat_from_json(j.at("stderr"), "stderr");
        for (int a = 0; a < mean.d; ++a)
            for (int b = 0; b < mean.d; ++b)
                rows.push_back({j.at("statistic").get<std::string>(), j.at("scale_n").get<double>(),
                                a + 1, b + 1, mean(a, b), se(a, b), j.at("replicas").get<int>(),
                                j.at("seed").get<uint64_t>()});
    };
    for (const auto& file : reports) {
        std::ifstream in(file);
        if (!in) throw std::invalid_argument("cannot open report file '" + file + "'");
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw std::invalid_argument("report '" + file + "' is not valid JSON: " + e.what());
        }
        if (j.contains("points")) {
            for (const auto& pt : j["points"]) ingest_report(pt.at("report"));
        } else if (j.contains("mean")) {
            ingest_report(j);
        } else {
            throw std::invalid_argument("report '" + file + "' has neither 'mean' nor 'points'");
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.statistic != b.statistic) return a.statistic < b.statistic;
        return a.n < b.n;
    });
    ctx.config = json{{"reports", reports}};
    auto os = ctx.open_output("plotdata.csv");
    os << "statistic,n,i,j,mean,stderr,M,seed\n";
    os << std::setprecision(17);
    for (const auto& r : rows)
        os << r.statistic << "," << r.n << "," << r.i << "," << r.j << "," << r.mean << "," << r.se
           << "," << r.m << "," << r.seed << "\n";
    ctx.write_manifest("plotdata");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rough-path scaling limits of additive functionals: simulators, lifts, "
                 "p-variation, predictions and Monte-Carlo verification"};
    app.require_subcommand(1);

    Ctx ctx;
    app.add_option("--config", ctx.config_path, "experiment config JSON")->envname("ROUGHWALK_CONFIG");
    app.add_option("--seed", ctx.seed, "override the config seed")->each([&](const std::string&) {
        ctx.seed_set = true;
    });
    app.add_option("--workers", ctx.workers, "worker threads (default: hardware)");
    app.add_option("--M", ctx.replicas_override, "override the config replica count");
    app.add_option("--out", ctx.out_dir, "output directory (default: .)");

    auto* sim = app.add_subcommand("simulate", "simulate one path and write CSVs");
    auto* lift = app.add_subcommand("lift", "lift a path CSV to level 2");
    std::string path_file, kind = "ito", method = "dp";
    double p = 2.5;
    bool level2 = false;
    int dyadic_level = 4;
    lift->add_option("--path", path_file, "path CSV")->required();
    lift->add_option("--kind", kind, "ito | strato");
    auto* pv = app.add_subcommand("pvar", "p-variation of a path CSV");
    pv->add_option("--path", path_file, "path CSV")->required();
    pv->add_option("--p", p, "variation exponent")->required();
    pv->add_option("--method", method, "dp | brute | dyadic");
    pv->add_flag("--level2", level2, "p/2-variation of the level-2 lift");
    pv->add_option("--dyadic-level", dyadic_level, "threshold 2^-level for --method dyadic");
    auto* pr = app.add_subcommand("predict", "closed-form/spectral limit prediction");
    auto* est = app.add_subcommand("estimate", "Monte-Carlo estimator report");
    auto* sw = app.add_subcommand("sweep", "convergence sweep or tightness probe over n");
    auto* rde = app.add_subcommand("rde", "driven-equation comparison against the corrected limit");
    auto* plot = app.add_subcommand("plotdata", "merge reports into tidy plotting CSV");
    std::vector<std::string> report_files;
    plot->add_option("--reports", report_files, "report/sweep JSON files");

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();
    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(ctx);
        if (lift->parsed()) return cmd_lift(ctx, path_file, kind);
        if (pv->parsed()) return cmd_pvar(ctx, path_file, p, method, level2, dyadic_level);
        if (pr->parsed()) return cmd_predict(ctx);
        if (est->parsed()) return cmd_estimate(ctx);
        if (sw->parsed()) return cmd_sweep(ctx);
        if (rde->parsed()) return cmd_rde(ctx);
        if (plot->parsed()) return cmd_plotdata(ctx, report_files);
    } catch (const std::invalid_argument& e) {
        std::cerr << json{{"error", {{"kind", "validation"}, {"message", e.what()}}}}.dump() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << json{{"error", {{"kind", "validation"}, {"message", e.what()}}}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"kind", "numerical"}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    }
    return 0;
}
