#pragma once

// Monte-Carlo estimation harness: batched replicas, covariance / level-2 /
// area-anomaly estimators, convergence sweeps and the tightness and Lepingle
// diagnostics. Replica r draws its stream from mix(base_seed, r), and
// per-replica statistics are stored by index and reduced in index order, so
// reports are bit-identical regardless of worker count.

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "roughwalk/homog.hpp"
#include "roughwalk/lift.hpp"
#include "roughwalk/models.hpp"

namespace roughwalk {

struct EstimatorReport {
    std::string statistic;
    Mat mean;
    Mat stderr_entry;  // entrywise sample std / sqrt(replicas)
    int replicas = 0;
    double scale_n = 0.0;
    uint64_t seed = 0;
    double wall_seconds = 0.0;
};

struct ConductanceModel {
    int d = 2;
    ConductanceLaw law;
};
struct OuModel {
    double step = 0.01;
};
struct PeriodicModel {
    PeriodicCoefficients coeffs;
    double step = 2e-3;
    int K = 32;
};
using ModelConfig = std::variant<ConductanceModel, OuModel, PeriodicModel>;

int model_dim(const ModelConfig& model);
std::string model_name(const ModelConfig& model);

// Runs body(0..nitems-1) on a small thread pool; workers <= 0 picks the
// hardware count (capped by ROUGHWALK_WORKERS when set).
void parallel_for(int nitems, int workers, const std::function<void(int)>& body);

struct BatchOptions {
    double T = 1.0;
    double n = 1.0;  // diffusive scale
    int replicas = 2;
    uint64_t seed = 0;
    int workers = 0;
};

// Joint per-replica statistics at macroscopic time T: X_T tensor square, the
// Ito and interpolated/trapezoid level-2 areas and their gap. Derived
// estimators (gamma_hat, the Ito-correction consistency) are linear in these
// and reuse the same replicas, which is what makes their stderr propagation
// exact.
struct BatchStats {
    int d = 0;
    int M = 0;
    double n = 0.0;
    double T = 1.0;
    uint64_t seed = 0;
    double wall_seconds = 0.0;
    std::vector<double> xx, ito, strato, gap;  // each M * d * d, row-major per replica
    std::vector<double> identity_defect;       // conductance only: per-replica max relative
                                               // defect of (strato - ito) vs the gap series

    Mat replica(const std::vector<double>& buf, int r) const;
    // which: covariance | level2_ito | level2_strato | gap | gamma_hat
    EstimatorReport report(const std::string& which) const;
    double identity_worst() const;
};

BatchStats run_batch(const ModelConfig& model, const BatchOptions& opts);

EstimatorReport estimate_covariance(const ModelConfig& model, const BatchOptions& opts);
EstimatorReport estimate_level2_mean(const ModelConfig& model, LiftKind kind, const BatchOptions& opts);
// Interpolation-gap mean; defined for the conductance model only.
EstimatorReport estimate_gap_mean(const ModelConfig& model, const BatchOptions& opts);
// Mean trapezoid-level area minus half the empirical covariance.
EstimatorReport gamma_hat(const ModelConfig& model, const BatchOptions& opts);

struct SweepPoint {
    double n = 0.0;
    EstimatorReport report;
    double deviation = 0.0;  // Frobenius distance to the target
};
struct ConvergenceSweep {
    std::string statistic;
    Mat target;
    std::vector<SweepPoint> points;
    double slope = 0.0;  // log-log fit of deviation against n
};
ConvergenceSweep convergence_sweep(const ModelConfig& model, const std::string& statistic,
                                   const Mat& target, const std::vector<double>& n_values,
                                   int replicas, uint64_t seed, int workers = 0);

struct TightnessRow {
    double n = 0.0;
    double q50 = 0.0, q90 = 0.0, q99 = 0.0;
};
struct TightnessProbe {
    double p = 0.0;
    std::vector<TightnessRow> rows;
    double slope_q90 = 0.0;
    double max_slope = 0.05;
    bool flat = false;
    bool asserted = true;  // p <= 2 is out of hypothesis: report only
};
TightnessProbe pvar_tightness_probe(const ModelConfig& model, double p,
                                    const std::vector<double>& n_values, int replicas,
                                    uint64_t seed, int workers = 0, double max_slope = 0.05);

enum class MartingaleSuite { SymmetricWalk, ConductanceMartingale };
struct LepingleReport {
    double p = 0.0;
    double mean_norm_sq = 0.0;  // E_hat[ ||M||_p^2 ]
    double mean_qv = 0.0;       // E_hat[ [M]_T ]
    double ratio = 0.0;
    int replicas = 0;
    bool in_band = false;  // loose two-sided sanity band [0.01, 100]
};
LepingleReport lepingle_diagnostic(MartingaleSuite suite, const ConductanceLaw& law, int d,
                                   double horizon, double p, int replicas, uint64_t seed,
                                   int workers = 0);

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace roughwalk
