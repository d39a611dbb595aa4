import math

import pytest

import roughwalk as rw


def test_pvar_matches_bruteforce_oracle():
    res = rw.pvar([0.0, 1.0, 0.0], d=1, p=2.0)
    assert res["value"] == pytest.approx(math.sqrt(2.0), abs=1e-14)
    assert res["partition"] == [0, 1, 2]
    brute = rw.pvar([0.0, 1.0, 0.0], d=1, p=2.0, method="brute")
    assert brute["value"] == res["value"]


def test_ou_prediction_values():
    pred = rw.ou_predict()
    assert pred["covariance"] == [[1.0, 0.0], [0.0, 1.0]]
    gamma = pred["gamma_strato"]
    assert gamma[0][1] == pytest.approx(-0.5, abs=1e-14)
    assert gamma[1][0] == pytest.approx(0.5, abs=1e-14)
    assert gamma[0][0] == pytest.approx(0.0, abs=1e-14)


def test_conductance_walk_lift_and_gap_identity():
    law = {"type": "uniform", "a": 1.0, "b": 2.0}
    path = rw.simulate_conductance_walk(law, d=2, horizon=50.0, seed=7)
    assert path.njumps() > 0
    macro = rw.diffusive_rescale(path, 50.0, 1.0)
    ito = rw.ito_lift_jump(macro)
    strato = rw.strato_lift_linear(rw.interpolate(macro))
    gap = rw.interpolation_gap(macro)
    t_last, g_last = gap[-1]
    s = strato.final_area()
    i = ito.final_area()
    for a in range(2):
        for b in range(2):
            assert s[a][b] - i[a][b] == pytest.approx(g_last[a][b], abs=1e-12)


def test_chen_reconstruction_is_consistent():
    law = {"type": "constant", "value": 1.0}
    path = rw.simulate_conductance_walk(law, d=2, horizon=20.0, seed=3)
    lift = rw.ito_lift_jump(path)
    times = lift.times
    full = rw.chen_reconstruct(lift, times[0], times[-1])
    final = lift.final_area()
    for a in range(2):
        for b in range(2):
            assert full[a][b] == pytest.approx(final[a][b], abs=1e-12)


def test_ou_simulation_and_rough_norm():
    micro = rw.simulate_ou(micro_horizon=20.0, step=0.05, seed=11)
    z = rw.additive_functional(micro, 20.0)
    lift = rw.strato_lift_linear(z)
    assert rw.rough_norm(lift, 2.5) > 0.0


def test_estimate_gamma_hat_small_run():
    report = rw.estimate({"model": "ou", "step": 0.05}, "gamma_hat", n=30.0, replicas=400, seed=5)
    mean = report["mean"]
    err = report["stderr"]
    assert abs(mean[0][1] + 0.5) <= 6.0 * err[0][1] + 0.1
    assert report["replicas"] == 400


def test_periodic_prediction_identity():
    pred = rw.periodic_predict("identity", K=8)
    assert pred["covariance"] == [[2.0, 0.0], [0.0, 2.0]]
    assert pred["residual"] == 0.0


def test_validation_errors_surface_as_exceptions():
    with pytest.raises(ValueError):
        rw.pvar([0.0, 1.0], d=1, p=0.5)
    with pytest.raises(ValueError):
        rw.simulate_conductance_walk({"type": "warp"}, d=2, horizon=1.0, seed=1)
