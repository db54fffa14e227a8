"""Smoke tests for the python module: thin checks that the bindings expose the
core operations correctly; the heavy validation lives in the C++ suites."""

import json
import os

import numpy as np
import pytest

import invariset as inv

FIXTURES = os.environ.get("INVARISET_FIXTURES", "fixtures")


def test_lambda_max_matches_numpy():
    rng = np.random.default_rng(1)
    for _ in range(10):
        raw = rng.uniform(-1, 1, size=(5, 5))
        sym = 0.5 * (raw + raw.T)
        value, vec = inv.lambda_max(sym)
        assert value == pytest.approx(np.linalg.eigvalsh(sym)[-1], abs=1e-10)
        assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-12)
        assert vec @ sym @ vec == pytest.approx(value, abs=1e-9)


def test_certificate_round_trip():
    q = np.diag([0.25, -1.0])
    family = [np.diag([1.0, -1.0])]
    cert = inv.solve_certificate(q, family)
    assert cert["certified"]
    tau = cert["weights"]
    assert tau.shape == (1,)
    assert inv.evaluate_r(q, family, tau) <= 1e-9 * (1 + np.linalg.norm(q))

    off = inv.solve_certificate(np.diag([4.0, -1.0]), family, max_iters=4000)
    assert not off["certified"]
    grid = inv.brute_force_r(np.diag([4.0, -1.0]), family, 0.0, 5.0, 2001)
    assert grid == pytest.approx(1.5, abs=1e-3)


def test_compute_and_membership():
    problem = {
        "system": {"modes": [[[0.5]]]},
        "quadratic": [{"Q": [[1.0]]}],
    }
    desc = inv.compute(json.dumps(problem))
    parsed = json.loads(desc)
    assert parsed["k_star"] == 0
    assert inv.membership(desc, np.array([0.9]))
    assert not inv.membership(desc, np.array([1.5]))


def test_compute_fixture_file():
    path = os.path.join(FIXTURES, "circle.json")
    with open(path) as fh:
        desc = json.loads(inv.compute(fh.read()))
    assert desc["k_star"] == 3


def test_lift_map_block():
    a = np.array([[0.5, 0.7], [-0.7, 0.5]])
    tilde = inv.lift_map(a, 4)
    expect = np.array([
        [0.5, 0.7, 0, 0, 0],
        [-0.7, 0.5, 0, 0, 0],
        [0, 0, -0.24, -0.35, 0.35],
        [0, 0, 0.7, 0.25, 0.49],
        [0, 0, -0.7, 0.49, 0.25],
    ])
    assert np.max(np.abs(tilde - expect)) < 1e-12
    z = inv.lift_vector(np.array([2.0, 3.0]), 4)
    assert list(z) == [2.0, 3.0, 6.0, 4.0, 9.0]
    assert [tuple(e) for e in inv.monomial_exponents(2, 4)] == [
        (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)]


def test_jsr_and_simulate():
    a = 0.5 * np.eye(2)
    assert inv.jsr_upper_bound([a], 1) == pytest.approx(0.5)
    traj = inv.simulate([a], np.array([1.0, -2.0]), [0, 0])
    assert np.allclose(traj[-1], [0.25, -0.5])


def test_validation_errors_surface():
    bad = {"system": {"modes": [[[2.0]]]}, "quadratic": [{"Q": [[1.0]]}]}
    with pytest.raises(ValueError):
        inv.compute(json.dumps(bad))
