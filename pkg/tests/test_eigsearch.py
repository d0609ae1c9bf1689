from fractions import Fraction

import numpy as np
import pytest

from commonness import eigsearch, quadrature
from commonness.eigsearch import DegenerateRounding


def test_diagonal_least_eigenpair():
    M = np.diag([3.0, 1.0, -2.0])
    for method in ("dense", "power"):
        res = eigsearch.least_eigenpair(M, method=method)
        assert res.lambda_min == pytest.approx(-2.0)
        np.testing.assert_allclose(np.abs(res.vector), [0, 0, 1], atol=1e-8)


@pytest.mark.parametrize("seed", range(5))
def test_power_route_agrees_with_dense(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(40, 40))
    M = (A + A.T) / 2
    dense = eigsearch.least_eigenpair(M)
    power = eigsearch.least_eigenpair(M, method="power")
    assert power.lambda_min == pytest.approx(dense.lambda_min, abs=1e-9)
    assert abs(power.vector @ dense.vector) == pytest.approx(1, abs=1e-6)


def test_discretized_kernel_routes_agree():
    dk = eigsearch.discretize((1, 2), 120)
    assert np.array_equal(dk.matrix, dk.matrix.T)
    dense = eigsearch.least_eigenpair(dk)
    power = eigsearch.least_eigenpair(dk, method="power")
    assert dense.lambda_min < 0
    assert power.lambda_min == pytest.approx(dense.lambda_min, abs=1e-10)
    assert dense.residual <= 1e-9


def test_alternating_start_not_reflection_antisymmetric():
    v = eigsearch.alternating_start(10)
    assert not np.allclose(v, -v[::-1])
    assert np.linalg.norm(v) == pytest.approx(1)


def test_round_to_step():
    v = np.array([0.1, 0.1, -0.5, -0.5, 1.0, 1.0, 0.0, 0.0])
    phi = eigsearch.round_to_step(v, 8, levels=10, denom=4)
    assert phi.values == (1, -5, 10, 0)
    assert phi.breakpoints == (0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1)
    merged = eigsearch.round_to_step(np.ones(8), 8, levels=3, denom=4)
    assert len(merged) == 1 and merged.values == (3,)
    with pytest.raises(DegenerateRounding):
        eigsearch.round_to_step(np.zeros(8), 8)
    with pytest.raises(ValueError):
        eigsearch.round_to_step(np.ones(7), 8)


def test_certify_uses_exact_integral():
    cert = eigsearch.certify((1, 2), quadrature.certificate_phi())
    assert cert.value == Fraction(-120959, 1600000)
    assert cert.uncommon and cert.verdict == "H not PSD => equation uncommon"
    flat = eigsearch.certify((1, 2), quadrature.StepFunction.constant(1))
    assert flat.value > 0 and flat.verdict == "inconclusive"


def test_discover_small_grid():
    eig, cert = eigsearch.discover((1, 2), N=100, denom=100)
    assert eig.lambda_min < 0
    assert cert.value < 0


def test_scan_small_range():
    rows = eigsearch.scan_pairs(1, 3, N=60)
    by_pair = {(r.pair.a, r.pair.b): r for r in rows}
    assert set(by_pair) == {(1, 2), (1, 3)}
    assert by_pair[(1, 2)].certified < 0
    text = eigsearch.scan_csv(rows)
    assert text.splitlines()[0] == "a,b,N,lambda_min,certified_value_num,certified_value_den"


def test_coprime_pairs():
    pairs = {(p.a, p.b) for p in eigsearch.coprime_pairs(3, 6)}
    assert pairs == {(1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (1, 5), (2, 5), (3, 5), (1, 6)}
