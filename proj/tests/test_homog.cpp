#include <doctest.h>

#include <cmath>

#include "roughwalk/homog.hpp"
#include "test_util.hpp"

using namespace roughwalk;
using rwtest::max_abs_diff;

TEST_CASE("ou prediction: corrector, covariance, anomaly") {
    const Mat a = OuParams::drift_rotation();
    const Mat c = 0.5 * (Mat::identity(2) - a);
    // C solves C (I + A) = I
    CHECK(max_abs_diff(matmul(c, Mat::identity(2) + a), Mat::identity(2)) <= 1e-15);

    const RoughLimitPrediction pred = ou_predict();
    CHECK(max_abs_diff(pred.covariance, Mat::identity(2)) == 0.0);
    CHECK(max_abs_diff(pred.gamma_strato, 0.5 * a) <= 1e-15);
    CHECK(max_abs_diff(pred.gamma_strato, -1.0 * pred.gamma_strato.transpose()) <= 1e-15);
    CHECK(max_abs_diff(pred.ito_correction, 0.5 * (Mat::identity(2) + a)) <= 1e-15);
    CHECK(pred.gap_prediction.max_abs() == 0.0);
}

TEST_CASE("ou anomaly against the direct gaussian-integral oracle") {
    // For the stationary chain, E[Z^n_{0,1}] = int_0^1 (I-A)^{-1}(I - e^{-(I-A)ns}) ds,
    // evaluated here by quadrature with the test-side matrix exponential; the
    // n -> infinity limit must equal covariance/2 + Gamma.
    const Mat a = OuParams::drift_rotation();
    Mat m = Mat::identity(2) - a;  // I - A
    Mat minv = 0.5 * (Mat::identity(2) + a);
    CHECK(max_abs_diff(matmul(m, minv), Mat::identity(2)) <= 1e-15);

    const double n = 800.0;
    const int quad = 4000;
    Mat mean(2);
    for (int k = 0; k < quad; ++k) {
        const double s = (k + 0.5) / quad;
        const Mat term = minv - matmul(minv, rwtest::expm(m * (-n * s)));
        mean += (1.0 / quad) * term;
    }
    const RoughLimitPrediction pred = ou_predict();
    const Mat predicted_mean = 0.5 * pred.covariance + pred.gamma_strato;
    CHECK(max_abs_diff(mean, predicted_mean) <= 5.0 / n);
}

TEST_CASE("conductance prediction: worked examples") {
    {
        const auto pred = conductance_predict(ConductanceLaw::constant(2.0), 2.0 * 2.0 * Mat::identity(2));
        CHECK(pred.gamma_strato.max_abs() == 0.0);
        CHECK(pred.ito_correction.max_abs() == 0.0);  // deterministic conductances: no correction
    }
    {
        const auto pred = conductance_predict(ConductanceLaw::uniform(1.0, 2.0), 2.8 * Mat::identity(2));
        CHECK(max_abs_diff(pred.gap_prediction, 1.5 * Mat::identity(2)) == 0.0);
    }
    {
        // d=1 two-point law: effective conductance is the harmonic mean 4/3,
        // correction (1/2) * 2 * (4/3) - 3/2 = -1/6
        const Mat cov = (2.0 * 4.0 / 3.0) * Mat::identity(1);
        const auto pred = conductance_predict(ConductanceLaw::two_point(1.0, 2.0, 0.5), cov);
        CHECK(pred.ito_correction(0, 0) == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
        CHECK(pred.ito_correction(0, 0) < 0.0);
    }
}

TEST_CASE("poisson solve: identity coefficients give a zero corrector") {
    const auto res = torus_poisson_solve(PeriodicCoefficients::identity(2), 8);
    CHECK(res.residual == 0.0);
    for (const auto& comp : res.phi.coeffs)
        for (const auto& c : comp) CHECK(std::abs(c) == 0.0);

    const auto pred = periodic_predict(PeriodicCoefficients::identity(2), res.phi);
    CHECK(max_abs_diff(pred.covariance, 2.0 * Mat::identity(2)) <= 1e-14);
    CHECK(pred.gamma_strato.max_abs() <= 1e-14);
    CHECK(max_abs_diff(pred.gap_prediction, Mat::identity(2)) <= 1e-14);
    CHECK(pred.ito_correction.max_abs() <= 1e-14);
}

TEST_CASE("poisson solve: d=1 closed form oracle") {
    const double a0 = 1.0, a1 = 0.5;
    const auto coeffs = PeriodicCoefficients::d1_cosine(a0, a1);
    const auto res = torus_poisson_solve(coeffs, 64);
    CHECK(res.residual <= 1e-8);

    // harmonic mean by quadrature (independent oracle) and in closed form
    const int quad = 20000;
    double inv_mean = 0.0;
    for (int k = 0; k < quad; ++k) {
        const double x = (k + 0.5) / quad;
        inv_mean += 1.0 / (a0 + a1 * std::cos(2.0 * M_PI * x)) / quad;
    }
    const double cstar = 1.0 / inv_mean;
    CHECK(cstar == doctest::Approx(std::sqrt(a0 * a0 - a1 * a1)).epsilon(1e-10));

    // phi' = -1 + c*/a pointwise
    for (int k = 0; k < 17; ++k) {
        const double x = static_cast<double>(k) / 17.0;
        // derivative series: sum 2 pi i k phi(k) e^{2 pi i k x}
        double phip = 0.0;
        const int K = res.phi.K;
        for (int f = -K; f <= K; ++f) {
            const std::vector<int> kv{f};
            const auto c = res.phi.coeffs[0][res.phi.index_of(kv)];
            const std::complex<double> e(std::cos(2.0 * M_PI * f * x), std::sin(2.0 * M_PI * f * x));
            phip += (std::complex<double>(0.0, 2.0 * M_PI * f) * c * e).real();
        }
        const double expect = -1.0 + cstar / (a0 + a1 * std::cos(2.0 * M_PI * x));
        CHECK(std::abs(phip - expect) <= 1e-8);
    }

    // effective diffusivity 2 c*, Voigt-Reiss bracketing
    const auto pred = periodic_predict(coeffs, res.phi);
    CHECK(std::abs(pred.covariance(0, 0) - 2.0 * cstar) <= 1e-8);
    CHECK(pred.covariance(0, 0) / 2.0 >= cstar - 1e-10);        // harmonic mean bound
    CHECK(pred.covariance(0, 0) / 2.0 <= a0 + 1e-10);           // arithmetic mean bound
    CHECK(pred.gamma_strato.max_abs() <= 1e-12);                // symmetric coefficients
}

TEST_CASE("poisson solve: non-reversible d=2 case is self-certifying and stable in K") {
    const auto coeffs = PeriodicCoefficients::antisym_sin2(0.5);
    const auto res32 = torus_poisson_solve(coeffs, 32);
    CHECK(res32.residual <= 1e-8);
    const auto pred32 = periodic_predict(coeffs, res32.phi);
    const auto pred64 = periodic_predict_spectral(coeffs, 64);

    CHECK(max_abs_diff(pred32.covariance, pred64.covariance) <= 1e-6);
    CHECK(max_abs_diff(pred32.gamma_strato, pred64.gamma_strato) <= 1e-6);

    // anomaly is exactly antisymmetric, covariance symmetric positive definite
    CHECK(max_abs_diff(pred32.gamma_strato, -1.0 * pred32.gamma_strato.transpose()) <= 1e-14);
    CHECK(max_abs_diff(pred32.covariance, pred32.covariance.transpose()) <= 1e-12);
    CHECK(min_eigenvalue_sym(pred32.covariance) > 0.0);
    // with a^S = I the gap prediction is the identity
    CHECK(max_abs_diff(pred32.gap_prediction, Mat::identity(2)) <= 1e-14);
}

TEST_CASE("poisson solve error paths") {
    const auto coeffs = PeriodicCoefficients::antisym_sin2(0.5);
    CHECK_THROWS_AS(torus_poisson_solve(coeffs, 0), std::invalid_argument);

    PeriodicCoefficients bad = PeriodicCoefficients::d1_cosine(1.0, 1.6);  // not elliptic
    CHECK_THROWS_AS(torus_poisson_solve(bad, 16), std::runtime_error);

    // mismatched corrector is rejected by the predictor
    TorusField wrong;
    wrong.dim = 1;
    wrong.components = 1;
    wrong.K = 4;
    wrong.coeffs.assign(1, std::vector<std::complex<double>>(9, 0.0));
    CHECK_THROWS_AS(periodic_predict(coeffs, wrong), std::invalid_argument);
}
