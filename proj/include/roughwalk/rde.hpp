#pragma once

// Differential equations driven by the simulated paths: left-point Euler for
// dY = sigma(Y_-) dX (exact for step drivers), Euler-Maruyama for the
// Gamma-corrected limit SDE, and a two-sample comparison report.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "roughwalk/homog.hpp"
#include "roughwalk/linalg.hpp"
#include "roughwalk/paths.hpp"
#include "roughwalk/rng.hpp"

namespace roughwalk {

// sigma: R^{dy} -> R^{dy x dx}; the derivative tensor dsigma(k,i,j) = d_k sigma_{ij}.
struct VectorField {
    int dy = 0, dx = 0;
    std::function<Mat(const Vec&)> sigma;                          // dy x dx (square Mat with d = dy = dx)
    std::function<double(int, int, int, const Vec&)> dsigma;       // (k, i, j, y)

    static VectorField constant(const Mat& m);
    // sigma_{ij}(y) = c_j y_i (column j is c_j * y); dy = dx = dim(c)
    static VectorField linear(const Vec& c);
    // sigma_{ij}(y) = p_{ij} + q_{ij} sin(u_{ij} . y), smooth and bounded,
    // with closed-form derivatives; u rows are filled from a fixed pattern.
    static VectorField sine(const Mat& p, const Mat& q, double wavelength);
};

// Left-point Euler across driver events/grid steps.
SampledPath euler_driven(const JumpPath& driver, const VectorField& field, const Vec& y0);
SampledPath euler_driven(const SampledPath& driver, const VectorField& field, const Vec& y0);

// Correction drift sum_{j,k,l} d_k sigma_{.j}(y) sigma_{kl}(y) Gamma_{jl}.
Vec correction_drift(const VectorField& field, const Mat& gamma, const Vec& y);

// Euler-Maruyama for dY = sigma(Y) dB + correction_drift(Y) dt where B is
// Brownian with the prediction's covariance and Gamma is chosen by the
// caller (Ito-level drivers take prediction.ito_correction, interpolated
// ones gamma_strato).
SampledPath euler_corrected_limit(const VectorField& field, const Mat& covariance, const Mat& gamma,
                                  const Vec& y0, double horizon, double step, Rng& rng);

struct CoordinateGap {
    double mean_a = 0.0, mean_b = 0.0, gap = 0.0, stderr_gap = 0.0, zscore = 0.0;
    double var_a = 0.0, var_b = 0.0, var_gap = 0.0, var_stderr = 0.0, var_zscore = 0.0;
};
struct CompareReport {
    std::vector<CoordinateGap> coords;
    double max_abs_z = 0.0;      // over mean gaps
    double max_abs_var_z = 0.0;  // over variance gaps
    bool means_within(double z) const { return max_abs_z <= z; }
};

// Per-coordinate mean/variance gaps with combined stderr; samples are flat
// (count x d) buffers with at least 10^3 rows each.
CompareReport compare_laws(const std::vector<double>& samples_a, const std::vector<double>& samples_b,
                           int d);

}  // namespace roughwalk
