import math

import numpy as np
import pytest

import frictio


K = frictio.Stiffness(2.0, 1.0, 2.0)


def test_critical_friction():
    assert frictio.critical_friction(K) == 2.0
    assert frictio.critical_friction(frictio.Stiffness(2.0, 0.0, 3.0)) is None


def test_tresca_example():
    s = frictio.tresca_minimize(K, [1.0, 3.0], 0.0, 0.0)
    np.testing.assert_allclose(s.u, [-1.0 / 3.0, 5.0 / 3.0], atol=1e-14)
    np.testing.assert_allclose(s.t, [0.0, 0.0], atol=1e-14)


def test_solve_incremental_kkt():
    sol = frictio.solve_incremental(K, [2.0, 0.0], 0.0, 1.0)
    assert sol["regime"] == "stick"
    assert sol["unique"]
    state = frictio.ContactState(sol["u"], sol["t"])
    assert frictio.check_incremental_kkt(K, [2.0, 0.0], 0.0, 1.0, state)["pass"]


def test_continuum_family():
    F, (lo, hi), states = frictio.continuum_family(K, 2.0, 3.0, samples=5)
    np.testing.assert_allclose(F, [1.5, 3.0])
    assert (lo, hi) == (-1.5, 0.0)
    for s in states:
        assert frictio.check_incremental_kkt(K, F, 0.0, 2.0, s)["pass"]


def test_march_reproduces_jump():
    rep = frictio.march_paper_jump(K, R=1.0, f=2.0, m=500)
    assert len(rep["jumps"]) == 1
    assert rep["jumps"][0][0] == 1.0
    assert rep["residuals"]["pass"]
    for s, u in zip(rep["times"], rep["u"]):
        np.testing.assert_allclose(u, frictio.paper_jump_state(K, 1.0, 2.0, s).u, atol=1e-6)


def test_march_polyline_at_rest():
    rep = frictio.march_polyline(K, [0.0, 1.0], np.zeros((2, 2)), 1.0, 10)
    assert np.all(rep["u"] == 0.0)
    assert rep["jumps"] == []


def test_subdivision_ramp():
    assert frictio.subdivision([0.0, 1.0], np.array([[0.0, 0.0], [1.0, 0.0]]), 1) == [0.0, 0.5, 1.0]


def test_triangle_stiffness():
    Kt = frictio.triangle_condensed_stiffness([-1, 0], [0, 0], [1, -1], E=4.0, nu=0.0)
    np.testing.assert_allclose(Kt.matrix(), [[3.0, 1.0], [1.0, 3.0]], atol=1e-13)
    assert math.isclose(frictio.critical_friction(Kt), 3.0, rel_tol=1e-13)


def test_solve_triangle_matches_condensed():
    res = frictio.solve_triangle([-1, 0], [0, 0], [1, -1], 4.0, 0.0, [0.0, -1.0], 0.0, 3.5)
    assert res["converged"]
    assert res["contact"].u[0] <= 1e-12


def test_errors_are_translated():
    with pytest.raises(frictio.FrictioError):
        frictio.continuum_family(K, 1.0, 1.0)
    with pytest.raises(frictio.FrictioError):
        frictio.Stiffness(1.0, 2.0, 1.0)
