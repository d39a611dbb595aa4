#include <doctest.h>

#include <cmath>

#include "roughwalk/mc.hpp"
#include "test_util.hpp"

using namespace roughwalk;
using rwtest::max_abs_diff;

namespace {

BatchOptions opts_of(double n, int m, uint64_t seed, int workers = 0) {
    BatchOptions o;
    o.n = n;
    o.replicas = m;
    o.seed = seed;
    o.workers = workers;
    return o;
}

}  // namespace

TEST_CASE("reports are bit-identical across worker counts") {
    const ModelConfig model = OuModel{0.05};
    const BatchStats one = run_batch(model, opts_of(5.0, 12, 7, 1));
    const BatchStats four = run_batch(model, opts_of(5.0, 12, 7, 4));
    CHECK(one.xx == four.xx);
    CHECK(one.strato == four.strato);
    CHECK(one.ito == four.ito);

    const ModelConfig cond = ConductanceModel{2, ConductanceLaw::uniform(1.0, 2.0)};
    const BatchStats c1 = run_batch(cond, opts_of(20.0, 10, 3, 1));
    const BatchStats c3 = run_batch(cond, opts_of(20.0, 10, 3, 3));
    CHECK(c1.xx == c3.xx);
    CHECK(c1.identity_defect == c3.identity_defect);
}

TEST_CASE("ou estimators approach the closed-form limits") {
    const ModelConfig model = OuModel{0.05};
    const BatchStats stats = run_batch(model, opts_of(60.0, 3000, 11));

    const EstimatorReport cov = stats.report("covariance");
    const RoughLimitPrediction pred = ou_predict();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(std::abs(cov.mean(i, j) - pred.covariance(i, j)) <=
                  5.0 * cov.stderr_entry(i, j) + 0.1);

    const EstimatorReport gamma = stats.report("gamma_hat");
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(std::abs(gamma.mean(i, j) - pred.gamma_strato(i, j)) <=
                  5.0 * gamma.stderr_entry(i, j) + 0.1);

    // stderr definition sanity: positive, shrinking scale
    CHECK(gamma.stderr_entry.max_abs() > 0.0);
    CHECK(gamma.replicas == 3000);

    // estimator sanity: covariance estimate is SPD up to stderr, its
    // antisymmetric part is statistically zero
    CHECK(min_eigenvalue_sym(cov.mean.sym()) > -3.0 * cov.stderr_entry.max_abs());
    CHECK(cov.mean.antisym().max_abs() <= 5.0 * cov.stderr_entry.max_abs());
}

TEST_CASE("conductance batch: exact gap identity and statistics") {
    const ModelConfig model = ConductanceModel{2, ConductanceLaw::uniform(1.0, 2.0)};
    const BatchStats stats = run_batch(model, opts_of(40.0, 1500, 13));
    CHECK(stats.identity_worst() <= 1e-12);

    // interpolation-gap mean is E[eta] I exactly in expectation
    const EstimatorReport gap = stats.report("gap");
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double target = i == j ? 1.5 : 0.0;
            CHECK(std::abs(gap.mean(i, j) - target) <= 5.0 * gap.stderr_entry(i, j) + 1e-9);
        }

    // reversibility: antisymmetric part of the Ito level-2 mean is noise
    const EstimatorReport ito = stats.report("level2_ito");
    const Mat anti = ito.mean.antisym();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(std::abs(anti(i, j)) <= 5.0 * ito.stderr_entry(i, j));

    // per-replica consistency: strato - ito equals the gap buffer
    for (int r = 0; r < stats.M; ++r) {
        const Mat diff = stats.replica(stats.strato, r) - stats.replica(stats.ito, r);
        CHECK(max_abs_diff(diff, stats.replica(stats.gap, r)) <= 1e-12);
    }
}

TEST_CASE("gap estimator rejects continuous models") {
    CHECK_THROWS_AS(estimate_gap_mean(OuModel{0.05}, opts_of(5.0, 4, 1)), std::invalid_argument);
}

TEST_CASE("estimator wrappers agree with the shared batch") {
    const ModelConfig model = ConductanceModel{1, ConductanceLaw::constant(1.0)};
    const BatchOptions opts = opts_of(10.0, 50, 41, 1);
    const BatchStats stats = run_batch(model, opts);
    CHECK(estimate_covariance(model, opts).mean.a == stats.report("covariance").mean.a);
    CHECK(estimate_level2_mean(model, LiftKind::Ito, opts).mean.a == stats.report("level2_ito").mean.a);
    CHECK(estimate_level2_mean(model, LiftKind::StratoLinear, opts).mean.a ==
          stats.report("level2_strato").mean.a);
    CHECK(estimate_gap_mean(model, opts).mean.a == stats.report("gap").mean.a);
    CHECK(gamma_hat(model, opts).mean.a == stats.report("gamma_hat").mean.a);
}

TEST_CASE("batch validation") {
    CHECK_THROWS_AS(run_batch(OuModel{0.05}, opts_of(5.0, 1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(run_batch(OuModel{0.05}, opts_of(-1.0, 4, 1)), std::invalid_argument);
    CHECK_THROWS_AS(run_batch(OuModel{0.05}, opts_of(5.0, 4, 1)).report("nope"), std::invalid_argument);
}

TEST_CASE("convergence sweep on the constant-conductance null model") {
    const ModelConfig model = ConductanceModel{1, ConductanceLaw::constant(1.0)};
    const ConvergenceSweep sweep =
        convergence_sweep(model, "covariance", 2.0 * Mat::identity(1), {10.0, 20.0, 40.0}, 400, 17);
    REQUIRE(sweep.points.size() == 3);
    for (const auto& pt : sweep.points) CHECK(pt.deviation <= 0.6);  // pure noise around the target
    CHECK(std::isfinite(sweep.slope));
    CHECK_THROWS_AS(convergence_sweep(model, "covariance", Mat::identity(1), {10.0, 20.0}, 64, 1),
                    std::invalid_argument);
}

TEST_CASE("tightness probe runs and reports") {
    const ModelConfig model = ConductanceModel{2, ConductanceLaw::uniform(1.0, 2.0)};
    const TightnessProbe probe = pvar_tightness_probe(model, 2.5, {5.0, 10.0, 20.0}, 60, 19);
    REQUIRE(probe.rows.size() == 3);
    for (const auto& row : probe.rows) {
        CHECK(row.q50 > 0.0);
        CHECK(row.q50 <= row.q90);
        CHECK(row.q90 <= row.q99);
    }
    CHECK(probe.asserted);

    const TightnessProbe boundary = pvar_tightness_probe(model, 2.0, {5.0, 10.0, 20.0}, 20, 19);
    CHECK_FALSE(boundary.asserted);  // out-of-hypothesis control: report only
}

TEST_CASE("lepingle diagnostic: bands and monotonicity in p") {
    const LepingleReport sym = lepingle_diagnostic(MartingaleSuite::SymmetricWalk,
                                                   ConductanceLaw::constant(0.5), 1, 100.0, 2.5, 150, 23);
    CHECK(sym.in_band);
    CHECK(sym.mean_qv == doctest::Approx(100.0).epsilon(0.15));  // ~ Poisson(100) jumps

    const LepingleReport sym4 = lepingle_diagnostic(MartingaleSuite::SymmetricWalk,
                                                    ConductanceLaw::constant(0.5), 1, 100.0, 4.0, 150, 23);
    CHECK(sym4.ratio <= sym.ratio + 1e-12);  // ||M||_p decreases in p

    const LepingleReport rc = lepingle_diagnostic(MartingaleSuite::ConductanceMartingale,
                                                  ConductanceLaw::uniform(1.0, 2.0), 2, 50.0, 2.5, 100, 29);
    CHECK(rc.in_band);
    CHECK_THROWS_AS(lepingle_diagnostic(MartingaleSuite::SymmetricWalk, ConductanceLaw::constant(0.5), 1,
                                        10.0, 2.0, 10, 1),
                    std::invalid_argument);
}

TEST_CASE("periodic batch with identity coefficients") {
    PeriodicModel pm;
    pm.coeffs = PeriodicCoefficients::identity(2);
    pm.step = 0.01;
    const BatchStats stats = run_batch(pm, opts_of(10.0, 800, 31));
    const EstimatorReport cov = stats.report("covariance");
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double target = i == j ? 2.0 : 0.0;
            CHECK(std::abs(cov.mean(i, j) - target) <= 5.0 * cov.stderr_entry(i, j));
        }
    // Ito vs trapezoid gap approaches the quadratic variation, int a^S = I
    const EstimatorReport gap = stats.report("gap");
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double target = i == j ? 1.0 : 0.0;
            CHECK(std::abs(gap.mean(i, j) - target) <= 5.0 * gap.stderr_entry(i, j) + 0.05);
        }
}
