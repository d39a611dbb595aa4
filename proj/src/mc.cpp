#include "roughwalk/mc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include "roughwalk/pvar.hpp"

namespace roughwalk {

int model_dim(const ModelConfig& model) {
    if (const auto* c = std::get_if<ConductanceModel>(&model)) return c->d;
    if (std::get_if<OuModel>(&model)) return 2;
    return std::get<PeriodicModel>(model).coeffs.d;
}

std::string model_name(const ModelConfig& model) {
    if (std::get_if<ConductanceModel>(&model)) return "conductance";
    if (std::get_if<OuModel>(&model)) return "ou";
    return "periodic";
}

void parallel_for(int nitems, int workers, const std::function<void(int)>& body) {
    if (workers <= 0) {
        if (const char* env = std::getenv("ROUGHWALK_WORKERS")) workers = std::atoi(env);
        if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers <= 0) workers = 1;
    }
    workers = std::min(workers, nitems);
    if (workers <= 1) {
        for (int i = 0; i < nitems; ++i) body(i);
        return;
    }
    std::atomic<int> next(0);
    std::exception_ptr error;
    std::atomic<bool> failed(false);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const int i = next.fetch_add(1);
                if (i >= nitems) break;
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    break;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failed && error) std::rethrow_exception(error);
}

Mat BatchStats::replica(const std::vector<double>& buf, int r) const {
    Mat m(d);
    const size_t dd = static_cast<size_t>(d) * d;
    for (size_t i = 0; i < dd; ++i) m.a[i] = buf[static_cast<size_t>(r) * dd + i];
    return m;
}

namespace {

struct MeanStderr {
    Mat mean, stderr_entry;
};

// Entrywise mean and stderr over M replicas of a flat (M x dd) buffer; coeff
// pairs allow linear combinations of two buffers (gamma_hat is
// strato - xx/2, evaluated per replica so the correlation between the two
// statistics is kept).
MeanStderr reduce(const std::vector<const std::vector<double>*>& bufs, const std::vector<double>& coeff,
                  int m_count, int d) {
    const size_t dd = static_cast<size_t>(d) * d;
    Mat mean(d), se(d);
    std::vector<double> acc(dd, 0.0), comp(dd, 0.0);
    for (int r = 0; r < m_count; ++r)
        for (size_t i = 0; i < dd; ++i) {
            double v = 0.0;
            for (size_t b = 0; b < bufs.size(); ++b)
                v += coeff[b] * (*bufs[b])[static_cast<size_t>(r) * dd + i];
            const double y = v - comp[i];
            const double t = acc[i] + y;
            comp[i] = (t - acc[i]) - y;
            acc[i] = t;
        }
    for (size_t i = 0; i < dd; ++i) mean.a[i] = acc[i] / m_count;
    std::vector<double> ss(dd, 0.0);
    for (int r = 0; r < m_count; ++r)
        for (size_t i = 0; i < dd; ++i) {
            double v = 0.0;
            for (size_t b = 0; b < bufs.size(); ++b)
                v += coeff[b] * (*bufs[b])[static_cast<size_t>(r) * dd + i];
            const double c = v - mean.a[i];
            ss[i] += c * c;
        }
    for (size_t i = 0; i < dd; ++i)
        se.a[i] = std::sqrt(ss[i] / (static_cast<double>(m_count) - 1.0) / m_count);
    return {mean, se};
}

void store_mat(std::vector<double>& buf, int r, const Mat& m) {
    const size_t dd = m.a.size();
    for (size_t i = 0; i < dd; ++i) buf[static_cast<size_t>(r) * dd + i] = m.a[i];
}

Mat final_area(const Level2Lift& lift) { return lift.area_at(lift.npoints() - 1); }

Mat tensor_square_final(const Level2Lift& lift) {
    const size_t last = lift.npoints() - 1;
    Vec x = lift.value(last);
    const Vec x0 = lift.value(0);
    for (int i = 0; i < lift.d; ++i) x[i] -= x0[i];
    return outer(x, x);
}

// max_k relative defect of strato-ito vs the running gap along a jump path
double gap_identity_defect(const Level2Lift& ito, const Level2Lift& stra, const GapSeries& gap) {
    const int d = ito.d;
    const size_t dd = static_cast<size_t>(d) * d;
    double worst = 0.0;
    for (size_t k = 0; k < gap.times.size(); ++k) {
        const size_t row = k + 1;  // lift grids carry t=0 first
        double scale = 1.0, defect = 0.0;
        for (size_t i = 0; i < dd; ++i) {
            const double s = stra.area[row * dd + i];
            const double t = ito.area[row * dd + i];
            const double g = gap.gap[k * dd + i];
            defect = std::max(defect, std::abs(s - t - g));
            scale = std::max({scale, std::abs(s), std::abs(t), std::abs(g)});
        }
        worst = std::max(worst, defect / scale);
    }
    return worst;
}

}  // namespace

BatchStats run_batch(const ModelConfig& model, const BatchOptions& opts) {
    if (opts.replicas < 2) throw std::invalid_argument("run_batch: need at least 2 replicas");
    if (!(opts.n > 0.0) || !(opts.T > 0.0))
        throw std::invalid_argument("run_batch: scale and horizon must be positive");

    const auto t0 = std::chrono::steady_clock::now();
    const int d = model_dim(model);
    const size_t dd = static_cast<size_t>(d) * d;

    BatchStats stats;
    stats.d = d;
    stats.M = opts.replicas;
    stats.n = opts.n;
    stats.T = opts.T;
    stats.seed = opts.seed;
    stats.xx.assign(static_cast<size_t>(opts.replicas) * dd, 0.0);
    stats.ito.assign(static_cast<size_t>(opts.replicas) * dd, 0.0);
    stats.strato.assign(static_cast<size_t>(opts.replicas) * dd, 0.0);
    stats.gap.assign(static_cast<size_t>(opts.replicas) * dd, 0.0);
    const bool is_conductance = std::holds_alternative<ConductanceModel>(model);
    if (is_conductance) stats.identity_defect.assign(static_cast<size_t>(opts.replicas), 0.0);

    parallel_for(opts.replicas, opts.workers, [&](int r) {
        Rng rng(replica_seed(opts.seed, static_cast<uint64_t>(r)));
        if (const auto* cm = std::get_if<ConductanceModel>(&model)) {
            ConductanceEnvironment env(cm->d, cm->law,
                                       mix64(replica_seed(opts.seed, static_cast<uint64_t>(r)), 0xE417u));
            const JumpPath micro = simulate_conductance_walk(env, opts.n * opts.T, rng);
            const JumpPath macro = diffusive_rescale(micro, opts.n, opts.T);
            const Level2Lift ito = ito_lift_jump(macro);
            const Level2Lift stra = strato_lift_linear(interpolate(macro));
            const GapSeries gap = interpolation_gap(macro);
            stats.identity_defect[static_cast<size_t>(r)] = gap_identity_defect(ito, stra, gap);
            store_mat(stats.xx, r, tensor_square_final(ito));
            store_mat(stats.ito, r, final_area(ito));
            store_mat(stats.strato, r, final_area(stra));
            store_mat(stats.gap, r, final_area(stra) - final_area(ito));
        } else if (const auto* om = std::get_if<OuModel>(&model)) {
            const SampledPath micro = simulate_ou(opts.n * opts.T, om->step, rng);
            const SampledPath z = additive_functional(
                micro, opts.n,
                [](const double* x, double* out) {
                    out[0] = x[0];
                    out[1] = x[1];
                },
                2);
            const Level2Lift stra = strato_lift_linear(z);
            const Level2Lift ito = ito_lift_sampled(z);
            store_mat(stats.xx, r, tensor_square_final(stra));
            store_mat(stats.ito, r, final_area(ito));
            store_mat(stats.strato, r, final_area(stra));
            store_mat(stats.gap, r, final_area(stra) - final_area(ito));
        } else {
            const auto& pm = std::get<PeriodicModel>(model);
            const SampledPath micro = simulate_periodic_diffusion(pm.coeffs, opts.n * opts.T, pm.step, rng);
            SampledPath macro = diffusive_rescale(micro, opts.n, opts.T);
            const Level2Lift ito = ito_lift_sampled(macro);
            macro.interp = Interp::PiecewiseLinear;  // trapezoid sums approximate the Stratonovich lift
            const Level2Lift stra = strato_lift_linear(macro);
            store_mat(stats.xx, r, tensor_square_final(stra));
            store_mat(stats.ito, r, final_area(ito));
            store_mat(stats.strato, r, final_area(stra));
            store_mat(stats.gap, r, final_area(stra) - final_area(ito));
        }
    });

    stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return stats;
}

EstimatorReport BatchStats::report(const std::string& which) const {
    MeanStderr ms;
    if (which == "covariance") {
        ms = reduce({&xx}, {1.0}, M, d);
    } else if (which == "level2_ito") {
        ms = reduce({&ito}, {1.0}, M, d);
    } else if (which == "level2_strato") {
        ms = reduce({&strato}, {1.0}, M, d);
    } else if (which == "gap") {
        ms = reduce({&gap}, {1.0}, M, d);
    } else if (which == "gamma_hat") {
        ms = reduce({&strato, &xx}, {1.0, -0.5}, M, d);
    } else {
        throw std::invalid_argument("BatchStats::report: unknown statistic '" + which + "'");
    }
    EstimatorReport rep;
    rep.statistic = which;
    rep.mean = ms.mean;
    rep.stderr_entry = ms.stderr_entry;
    rep.replicas = M;
    rep.scale_n = n;
    rep.seed = seed;
    rep.wall_seconds = wall_seconds;
    return rep;
}

double BatchStats::identity_worst() const {
    double w = 0.0;
    for (double v : identity_defect) w = std::max(w, v);
    return w;
}

EstimatorReport estimate_covariance(const ModelConfig& model, const BatchOptions& opts) {
    return run_batch(model, opts).report("covariance");
}

EstimatorReport estimate_level2_mean(const ModelConfig& model, LiftKind kind, const BatchOptions& opts) {
    return run_batch(model, opts).report(kind == LiftKind::Ito ? "level2_ito" : "level2_strato");
}

EstimatorReport estimate_gap_mean(const ModelConfig& model, const BatchOptions& opts) {
    if (!std::holds_alternative<ConductanceModel>(model))
        throw std::invalid_argument("estimate_gap_mean: interpolation gap is a jump-model statistic "
                                    "(lift/model mismatch)");
    return run_batch(model, opts).report("gap");
}

EstimatorReport gamma_hat(const ModelConfig& model, const BatchOptions& opts) {
    return run_batch(model, opts).report("gamma_hat");
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < n; ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return den > 0.0 ? num / den : 0.0;
}

ConvergenceSweep convergence_sweep(const ModelConfig& model, const std::string& statistic,
                                   const Mat& target, const std::vector<double>& n_values,
                                   int replicas, uint64_t seed, int workers) {
    if (n_values.size() < 3) throw std::invalid_argument("convergence_sweep: need at least 3 scales");
    for (size_t i = 1; i < n_values.size(); ++i)
        if (!(n_values[i] > n_values[i - 1]))
            throw std::invalid_argument("convergence_sweep: scales must be strictly increasing");
    ConvergenceSweep sweep;
    sweep.statistic = statistic;
    sweep.target = target;
    std::vector<double> lx, ly;
    for (double n : n_values) {
        BatchOptions opts;
        opts.n = n;
        opts.replicas = replicas;
        opts.seed = seed;
        opts.workers = workers;
        SweepPoint pt;
        pt.n = n;
        pt.report = run_batch(model, opts).report(statistic);
        pt.deviation = (pt.report.mean - target).frobenius();
        sweep.points.push_back(pt);
        lx.push_back(std::log(n));
        ly.push_back(std::log(std::max(pt.deviation, 1e-300)));
    }
    sweep.slope = fit_slope(lx, ly);
    return sweep;
}

TightnessProbe pvar_tightness_probe(const ModelConfig& model, double p,
                                    const std::vector<double>& n_values, int replicas,
                                    uint64_t seed, int workers, double max_slope) {
    if (!(p > 0.0)) throw std::invalid_argument("pvar_tightness_probe: p must be positive");
    TightnessProbe probe;
    probe.p = p;
    probe.max_slope = max_slope;
    probe.asserted = p > 2.0;  // p <= 2 is outside the theory; report only

    std::vector<double> lx, ly;
    for (double n : n_values) {
        std::vector<double> norms(static_cast<size_t>(replicas), 0.0);
        parallel_for(replicas, workers, [&](int r) {
            Rng rng(replica_seed(mix64(seed, static_cast<uint64_t>(n * 1e6)), static_cast<uint64_t>(r)));
            if (const auto* cm = std::get_if<ConductanceModel>(&model)) {
                ConductanceEnvironment env(
                    cm->d, cm->law,
                    mix64(replica_seed(mix64(seed, static_cast<uint64_t>(n * 1e6)), static_cast<uint64_t>(r)),
                          0xE417u));
                const JumpPath micro = simulate_conductance_walk(env, n, rng);
                const JumpPath macro = diffusive_rescale(micro, n, 1.0);
                norms[static_cast<size_t>(r)] = rough_norm(ito_lift_jump(macro), std::max(p, 2.0));
            } else if (const auto* om = std::get_if<OuModel>(&model)) {
                const SampledPath micro = simulate_ou(n, om->step, rng);
                const SampledPath z = additive_functional(
                    micro, n,
                    [](const double* x, double* out) {
                        out[0] = x[0];
                        out[1] = x[1];
                    },
                    2);
                norms[static_cast<size_t>(r)] = rough_norm(strato_lift_linear(z), std::max(p, 2.0));
            } else {
                const auto& pm = std::get<PeriodicModel>(model);
                const SampledPath micro = simulate_periodic_diffusion(pm.coeffs, n, pm.step, rng);
                SampledPath macro = diffusive_rescale(micro, n, 1.0);
                macro.interp = Interp::PiecewiseLinear;
                norms[static_cast<size_t>(r)] = rough_norm(strato_lift_linear(macro), std::max(p, 2.0));
            }
        });
        std::sort(norms.begin(), norms.end());
        auto quantile = [&](double q) {
            size_t idx = static_cast<size_t>(std::ceil(q * replicas));
            if (idx > 0) --idx;
            return norms[std::min(idx, norms.size() - 1)];
        };
        TightnessRow row;
        row.n = n;
        row.q50 = quantile(0.50);
        row.q90 = quantile(0.90);
        row.q99 = quantile(0.99);
        probe.rows.push_back(row);
        lx.push_back(std::log(n));
        ly.push_back(std::log(std::max(row.q90, 1e-300)));
    }
    probe.slope_q90 = fit_slope(lx, ly);
    probe.flat = probe.slope_q90 <= max_slope;
    return probe;
}

namespace {

// Martingale part of the conductance walk as a vertex polyline: between jumps
// N drifts with -F(site), at jumps it moves by the jump. The vertex list is
// exact for the p-variation (both endpoints of every linear piece and of
// every jump are present).
std::vector<double> conductance_martingale_vertices(const JumpPath& micro,
                                                    const ConductanceEnvironment& env) {
    const int d = micro.d;
    std::vector<int64_t> site(static_cast<size_t>(d), 0);
    std::vector<int64_t> nbr(static_cast<size_t>(d), 0);
    Vec nval(static_cast<size_t>(d), 0.0);
    std::vector<double> vertices;
    vertices.insert(vertices.end(), nval.begin(), nval.end());
    double tprev = 0.0;
    auto local_drift = [&](int j) {
        for (int i = 0; i < d; ++i) nbr[i] = site[i];
        nbr[j] -= 1;
        return env.weight(site.data(), j) - env.weight(nbr.data(), j);
    };
    for (size_t k = 0; k < micro.njumps(); ++k) {
        const double dt = micro.times[k] - tprev;
        for (int j = 0; j < d; ++j) nval[j] -= local_drift(j) * dt;
        vertices.insert(vertices.end(), nval.begin(), nval.end());  // pre-jump vertex
        const double* dx = micro.increment_ptr(k);
        for (int j = 0; j < d; ++j) {
            nval[j] += dx[j];
            site[j] += static_cast<int64_t>(std::llround(dx[j]));
        }
        vertices.insert(vertices.end(), nval.begin(), nval.end());  // post-jump vertex
        tprev = micro.times[k];
    }
    const double dt = micro.horizon - tprev;
    for (int j = 0; j < d; ++j) nval[j] -= local_drift(j) * dt;
    vertices.insert(vertices.end(), nval.begin(), nval.end());
    return vertices;
}

}  // namespace

LepingleReport lepingle_diagnostic(MartingaleSuite suite, const ConductanceLaw& law, int d,
                                   double horizon, double p, int replicas, uint64_t seed,
                                   int workers) {
    if (!(p > 2.0)) throw std::invalid_argument("lepingle_diagnostic: p must be > 2");
    std::vector<double> num(static_cast<size_t>(replicas), 0.0);
    std::vector<double> den(static_cast<size_t>(replicas), 0.0);
    parallel_for(replicas, workers, [&](int r) {
        Rng rng(replica_seed(seed, static_cast<uint64_t>(r)));
        ConductanceEnvironment env(d, law, mix64(replica_seed(seed, static_cast<uint64_t>(r)), 0xE417u));
        const JumpPath micro = simulate_conductance_walk(env, horizon, rng);
        if (suite == MartingaleSuite::SymmetricWalk) {
            // constant law: the walk itself is a pure-jump martingale
            const double v = pvar_grid_dp(event_values(micro), d, p).value;
            num[static_cast<size_t>(r)] = v * v;
            den[static_cast<size_t>(r)] = static_cast<double>(micro.njumps());
        } else {
            const std::vector<double> verts = conductance_martingale_vertices(micro, env);
            const double v = pvar_grid_dp(verts, d, p).value;
            num[static_cast<size_t>(r)] = v * v;
            den[static_cast<size_t>(r)] = static_cast<double>(micro.njumps());
        }
    });
    LepingleReport rep;
    rep.p = p;
    rep.replicas = replicas;
    for (int r = 0; r < replicas; ++r) {
        rep.mean_norm_sq += num[static_cast<size_t>(r)];
        rep.mean_qv += den[static_cast<size_t>(r)];
    }
    rep.mean_norm_sq /= replicas;
    rep.mean_qv /= replicas;
    if (rep.mean_qv <= 0.0) throw std::runtime_error("lepingle_diagnostic: zero quadratic variation");
    rep.ratio = rep.mean_norm_sq / rep.mean_qv;
    rep.in_band = rep.ratio >= 0.01 && rep.ratio <= 100.0;
    return rep;
}

}  // namespace roughwalk
