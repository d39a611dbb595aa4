#pragma once

// Predictors of the limit rough path: covariance <B,B>_1, Stratonovich
// anomaly Gamma, and the Ito-level correction, per model. The periodic model
// goes through a Fourier-Galerkin solve of the corrector Poisson equation;
// the models implemented here all have spectral gaps, so the lambda = 0
// Poisson equation is solved directly instead of the resolvent limit.

#include <complex>
#include <vector>

#include "roughwalk/linalg.hpp"
#include "roughwalk/models.hpp"

namespace roughwalk {

enum class Provenance { ClosedForm, Spectral, EmpiricalFormula };

struct RoughLimitPrediction {
    int d = 0;
    Mat covariance;      // <B,B>_1
    Mat gamma_strato;    // Stratonovich anomaly
    Mat gap_prediction;  // limit of E[strato lift - Ito lift] at t = 1
    Mat ito_correction;  // total additive term of the Ito-level limit at t = 1,
                         // = 1/2 covariance + gamma_strato - gap_prediction
    Provenance provenance = Provenance::ClosedForm;
    double residual = 0.0;  // spectral solves only
};

// Real scalar/vector field on the torus, truncated Fourier coefficients on
// |k_i| <= K. Zero modes are pinned to 0 (zero-mean fields).
struct TorusField {
    int dim = 0;         // torus dimension
    int components = 0;  // number of field components
    int K = 0;
    std::vector<std::vector<std::complex<double>>> coeffs;  // per component, (2K+1)^dim dense

    size_t side() const { return static_cast<size_t>(2 * K + 1); }
    size_t grid_size() const;
    size_t index_of(const std::vector<int>& k) const;
    double eval(const double* x, int component) const;
};

struct PoissonSolveResult {
    TorusField phi;
    double residual = 0.0;  // || div(a grad phi) + b ||_{L^2}, certified on the
                            // extended frequency set reachable from the cutoff
};

// Galerkin solve of -div(a grad Phi) = b, b_j = sum_i d_i a_{ij}, with
// zero-mean constraint, frequencies |k_i| <= K. Throws when the system is
// singular or the certified residual stays above tol (K insufficient).
PoissonSolveResult torus_poisson_solve(const PeriodicCoefficients& coeffs, int K, double tol = 1e-8,
                                       int maxit = 4000);

// Limit predictions per model.
RoughLimitPrediction ou_predict();
RoughLimitPrediction conductance_predict(const ConductanceLaw& law, const Mat& empirical_cov);
RoughLimitPrediction periodic_predict(const PeriodicCoefficients& coeffs, const TorusField& phi);

// Convenience: solve + predict in one go.
RoughLimitPrediction periodic_predict_spectral(const PeriodicCoefficients& coeffs, int K,
                                               double tol = 1e-8);

}  // namespace roughwalk
