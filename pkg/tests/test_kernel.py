from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from commonness import kernel
from commonness.kernel import SymmetricPair

F = Fraction
PAIRS = [(1, 2), (1, 3), (2, 3), (2, 5), (3, 7)]


def alpha_minmax(a, b, u):
    return max(min(F(b), u) - max(u - a, F(0)), F(0)) / (a * b)


def beta_minmax(u):
    return max(min(F(1), u + 1) - max(u, F(0)), F(0))


unit = st.fractions(min_value=0, max_value=1, max_denominator=60)
real = st.fractions(min_value=-3, max_value=12, max_denominator=60)


@given(st.sampled_from(PAIRS), real)
def test_alpha_beta_match_min_max_forms(pair, u):
    assert kernel.alpha(pair, u) == alpha_minmax(*pair, u)
    assert kernel.beta(u) == beta_minmax(abs(u)) == beta_minmax(-u) == beta_minmax(u)
    assert kernel.eval_ramps(kernel.alpha_ramps(pair), u) == kernel.alpha(pair, u)
    assert kernel.eval_ramps(kernel.beta_ramps(), u) == kernel.beta(u)


@given(st.sampled_from(PAIRS), unit, unit)
def test_h_symmetric_and_matches_summands(pair, u, v):
    h = kernel.H(pair, u, v)
    assert h == kernel.H(pair, v, u)
    assert h == sum(s(u, v) for s in kernel.summands(pair))
    assert float(h) == pytest.approx(float(kernel.H_array(pair, float(u), float(v))), abs=1e-12)


def test_known_values():
    # alpha(0) + alpha(0) + alpha(1) + alpha(1) + beta(0)/2 + beta(0) for (1, 2)
    assert kernel.H((1, 2), 0, 0) == F(5, 2)
    assert kernel.alpha((1, 2), F(3, 2)) == F(1, 2)
    assert kernel.alpha((2, 5), 7) == 0
    assert kernel.beta(F(1, 3)) == F(2, 3)


def test_lipschitz_bound_holds_on_grid():
    pair = (1, 2)
    L = kernel.lipschitz_constant(pair)
    assert L == F(21, 4)
    g = [F(i, 40) for i in range(41)]
    for u in g:
        for v in g[:-1]:
            assert abs(kernel.H(pair, u, v + F(1, 40)) - kernel.H(pair, u, v)) <= L / 40


def test_breaklines_contain_diagonal():
    lines = kernel.breaklines((1, 2))
    assert any(p == -q and c == 0 for p, q, c in lines)


@pytest.mark.parametrize("bad", [(2, 1), (2, 4), (0, 3), (3, 3)])
def test_pair_validation(bad):
    with pytest.raises(ValueError):
        SymmetricPair(*bad)


def test_pair_parse_and_coeffs():
    p = SymmetricPair.parse("2,5")
    assert p.coeffs == (2, 5, -2, -5) and str(p) == "2,5"


def test_h_domain():
    with pytest.raises(ValueError):
        kernel.H((1, 2), F(11, 10), 0)


def test_h_array_broadcast():
    x = np.linspace(0, 1, 7)
    M = kernel.H_array((1, 3), x[:, None], x[None, :])
    assert M.shape == (7, 7)
    np.testing.assert_allclose(M, M.T, atol=1e-14)
