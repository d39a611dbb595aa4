#include <doctest.h>

#include <cmath>

#include "roughwalk/pvar.hpp"
#include "test_util.hpp"

using namespace roughwalk;

namespace {

double partition_sum(const std::vector<double>& values, int d, const std::vector<size_t>& part, double p) {
    double s = 0.0;
    for (size_t k = 0; k + 1 < part.size(); ++k) {
        double d2 = 0.0;
        for (int i = 0; i < d; ++i) {
            const double x = values[part[k + 1] * d + i] - values[part[k] * d + i];
            d2 += x * x;
        }
        s += std::pow(d2, 0.5 * p);
    }
    return s;
}

}  // namespace

TEST_CASE("pvar dp: worked examples") {
    CHECK(pvar_grid_dp({0, 1, 3}, 1, 2.0).value == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(pvar_grid_dp({0, 1, 3}, 1, 2.0).partition == std::vector<size_t>{0, 2});

    const auto zigzag = pvar_grid_dp({0, 1, 0}, 1, 2.0);
    CHECK(zigzag.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(zigzag.partition == std::vector<size_t>{0, 1, 2});

    // p = 1 on a piecewise-linear path is the total variation
    Rng rng(3);
    const auto path = rwtest::random_sampled_path(2, 15, 1.0, rng);
    double tv = 0.0;
    for (size_t k = 0; k + 1 < path.npoints(); ++k) {
        double d2 = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double x = path.values[(k + 1) * 2 + i] - path.values[k * 2 + i];
            d2 += x * x;
        }
        tv += std::sqrt(d2);
    }
    CHECK(pvar_grid_dp(path.values, 2, 1.0).value == doctest::Approx(tv).epsilon(1e-13));

    CHECK_THROWS_AS(pvar_grid_dp({0, 1}, 1, 0.9), std::invalid_argument);
}

TEST_CASE("pvar brute force: worked examples") {
    CHECK(pvar_bruteforce({0, 5}, 1, 2.5).value == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(pvar_bruteforce({0, 1, 0}, 1, 3.0).value == doctest::Approx(std::cbrt(2.0)).epsilon(1e-15));
    std::vector<double> too_long(25, 0.0);
    CHECK_THROWS_AS(pvar_bruteforce(too_long, 1, 2.0), std::invalid_argument);
}

TEST_CASE("dp equals brute force on random suites") {
    Rng rng(101);
    for (const double p : {1.0, 1.5, 2.0, 2.5, 3.0}) {
        for (int rep = 0; rep < 40; ++rep) {
            const size_t npts = 2 + rng.u64() % 11;
            std::vector<double> values;
            const int d = 1 + static_cast<int>(rng.u64() % 3);
            for (size_t k = 0; k < npts * static_cast<size_t>(d); ++k) values.push_back(rng.normal());
            const auto dp = pvar_grid_dp(values, d, p);
            const auto bf = pvar_bruteforce(values, d, p);
            CHECK(dp.value == bf.value);
            CHECK(partition_sum(values, d, dp.partition, p) ==
                  doctest::Approx(std::pow(dp.value, p)).epsilon(1e-12));
            CHECK(partition_sum(values, d, bf.partition, p) ==
                  doctest::Approx(std::pow(bf.value, p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("pvar monotonicity in p and under restriction") {
    Rng rng(102);
    for (int rep = 0; rep < 20; ++rep) {
        const auto path = rwtest::random_sampled_path(2, 20, 1.0, rng);
        const double v25 = pvar_grid_dp(path.values, 2, 2.5).value;
        const double v30 = pvar_grid_dp(path.values, 2, 3.0).value;
        const double v20 = pvar_grid_dp(path.values, 2, 2.0).value;
        CHECK(v30 <= v25 + 1e-12);
        CHECK(v25 <= v20 + 1e-12);

        // restriction to a subinterval cannot increase the norm
        std::vector<double> head(path.values.begin(), path.values.begin() + 12L * 2);
        CHECK(pvar_grid_dp(head, 2, 2.5).value <= v25 + 1e-12);
    }
}

TEST_CASE("pvar area: worked examples and brute-force oracle") {
    SampledPath zig;
    zig.d = 1;
    zig.interp = Interp::PiecewiseLinear;
    zig.times = {0, 0.5, 1};
    zig.values = {0, 1, 0};
    const auto lift = strato_lift_linear(zig);
    const auto q1 = pvar_area(lift, 1.0);
    CHECK(q1.value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q1.partition == std::vector<size_t>{0, 1, 2});

    // zero area process
    SampledPath flat;
    flat.d = 1;
    flat.interp = Interp::PiecewiseLinear;
    flat.times = {0, 1};
    flat.values = {0, 0};
    CHECK(pvar_area(strato_lift_linear(flat), 1.25).value == 0.0);

    Rng rng(103);
    for (int rep = 0; rep < 25; ++rep) {
        const auto jp = rwtest::random_jump_path(2, 8, 1.0, rng);
        const auto l = ito_lift_jump(jp);
        if (l.npoints() > 10) continue;
        for (const double q : {1.0, 1.25, 1.5}) {
            const auto dp = pvar_area(l, q);
            const auto bf = pvar_area_bruteforce(l, q);
            CHECK(dp.value == doctest::Approx(bf.value).epsilon(1e-13));
        }
    }
    CHECK_THROWS_AS(pvar_area(lift, 0.5), std::invalid_argument);
}

TEST_CASE("rough norm: worked examples") {
    SampledPath still;
    still.d = 1;
    still.interp = Interp::PiecewiseLinear;
    still.times = {0, 1};
    still.values = {0, 0};
    CHECK(rough_norm(strato_lift_linear(still), 2.0) == 0.0);

    JumpPath single;
    single.d = 2;
    single.horizon = 1.0;
    single.start = {0, 0};
    single.times = {0.5};
    single.increments = {1, 0};
    CHECK(rough_norm(ito_lift_jump(single), 2.0) == doctest::Approx(1.0).epsilon(1e-14));

    SampledPath ramp;
    ramp.d = 1;
    ramp.interp = Interp::PiecewiseLinear;
    ramp.times = {0, 1};
    ramp.values = {0, 2};
    CHECK(rough_norm(strato_lift_linear(ramp), 2.0) ==
          doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-14));

    CHECK_THROWS_AS(rough_norm(strato_lift_linear(ramp), 1.5), std::invalid_argument);
}

TEST_CASE("control function checks") {
    std::vector<double> times;
    for (int k = 0; k <= 10; ++k) times.push_back(0.1 * k);

    const auto additive = control_check(times.size(), [&](size_t i, size_t j) { return times[j] - times[i]; });
    CHECK(std::abs(additive.max_defect) <= 1e-15);

    const auto quadratic = control_check(times.size(), [&](size_t i, size_t j) {
        const double dt = times[j] - times[i];
        return dt * dt;
    });
    CHECK(quadratic.max_defect <= 1e-15);

    Rng rng(104);
    const auto path = rwtest::random_sampled_path(2, 12, 1.0, rng);
    const auto pv = control_check(path.npoints(), [&](size_t i, size_t j) {
        std::vector<double> window(path.values.begin() + static_cast<long>(i) * 2,
                                   path.values.begin() + static_cast<long>(j + 1) * 2);
        return std::pow(pvar_grid_dp(window, 2, 2.5).value, 2.5);
    });
    CHECK(pv.max_defect <= 1e-9 * std::max(1.0, std::abs(pv.max_defect)));

    CHECK_THROWS_AS(control_check(2, [](size_t, size_t) { return 0.0; }), std::invalid_argument);
}

TEST_CASE("dyadic skeleton") {
    // threshold above the oscillation: no skeleton jumps
    Rng rng(105);
    SampledPath small = rwtest::random_sampled_path(1, 9, 1.0, rng);
    for (double& v : small.values) v *= 1e-3;
    CHECK(dyadic_skeleton(small, 1).njumps() == 0);

    // unit staircase against threshold 1/2: every step is kept
    JumpPath stair;
    stair.d = 1;
    stair.horizon = 5.0;
    stair.start = {0};
    for (int k = 1; k <= 4; ++k) {
        stair.times.push_back(k);
        stair.increments.push_back(1.0);
    }
    const JumpPath skel = dyadic_skeleton(stair, 1);
    CHECK(skel.njumps() == 4);
    CHECK(skel.times == stair.times);

    // pointwise guarantee and p-var comparison on a random walk suite
    Rng rng2(106);
    for (int rep = 0; rep < 10; ++rep) {
        const auto jp = rwtest::random_jump_path(2, 60, 1.0, rng2);
        const int level = 2;
        const JumpPath sk = dyadic_skeleton(jp, level);
        const double thr = std::ldexp(1.0, -level);
        const auto vals = event_values(jp);
        // left limits over (tau_k, tau_{k+1}] stay within the threshold
        const std::vector<double> skvals = event_values(sk);
        std::vector<double> times{0.0};
        for (double t : jp.times) times.push_back(t);
        for (size_t k = 1; k < times.size(); ++k) {
            size_t which = 0;
            while (which < sk.njumps() && sk.times[which] < times[k]) ++which;
            // value of the skeleton just before times[k]
            double dev = 0.0;
            for (int i = 0; i < 2; ++i) {
                const double skv = skvals[which * 2 + i];
                const double left = vals[(k - 1) * 2 + i];
                dev += (left - skv) * (left - skv);
            }
            CHECK(std::sqrt(dev) <= thr + 1e-12);
        }
        const double pv_full = pvar_grid_dp(vals, 2, 2.5).value;
        const double pv_skel = pvar_grid_dp(event_values(sk), 2, 2.5).value;
        CHECK(pv_skel <= pv_full + thr * static_cast<double>(sk.njumps() + 1));
    }
}

TEST_CASE("lepingle ratio") {
    JumpPath single;
    single.d = 1;
    single.horizon = 1.0;
    single.start = {0};
    single.times = {0.5};
    single.increments = {1.0};
    CHECK(lepingle_ratio(single, 2.5) == doctest::Approx(1.0).epsilon(1e-14));

    // deterministic monotone staircase (negative control, not a martingale):
    // the ratio grows like the jump count
    for (const size_t k : {4UL, 8UL, 16UL}) {
        JumpPath stair;
        stair.d = 1;
        stair.horizon = static_cast<double>(k) + 1.0;
        stair.start = {0};
        for (size_t j = 1; j <= k; ++j) {
            stair.times.push_back(static_cast<double>(j));
            stair.increments.push_back(1.0);
        }
        CHECK(lepingle_ratio(stair, 2.5) == doctest::Approx(static_cast<double>(k)).epsilon(1e-12));
    }

    JumpPath empty;
    empty.d = 1;
    empty.horizon = 1.0;
    empty.start = {0};
    CHECK_THROWS_AS(lepingle_ratio(empty, 2.5), std::invalid_argument);
    CHECK_THROWS_AS(lepingle_ratio(single, 2.0), std::invalid_argument);
}
