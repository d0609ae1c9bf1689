"""End-to-end acceptance checks; each test prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they are
also repeated in the terminal summary.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from commonness import coloropt, decomp, eigsearch, kernel, linear, quadrature, reproduce
from commonness.linear import SCHUR, THREE_AP, LinearForm, WeightFn


def timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def test_1_exact_certificate(report):
    value, dt = timed(lambda: quadrature.integrate_quadratic((1, 2), quadrature.certificate_phi()))
    ok = value == Fraction(-120959, 1600000) and dt < 10
    assert report("1 exact certificate", ok, f"value {value}, {dt:.2f}s")


def test_2_decomposition_identity(report):
    (ok, detail), dt = timed(reproduce.check_decomposition)
    assert report("2 decomposition identity", ok and dt < 120, f"{detail}, {dt:.1f}s")


def test_3_counting_oracles(report):
    rng = np.random.default_rng(3)
    mismatches = 0
    ks = []
    t = time.perf_counter()
    for i in range(100):
        k = (3, 4, 5)[i % 3]
        ks.append(k)
        coeffs = [int(c) * int(rng.choice((-1, 1))) for c in rng.integers(1, 5, size=k)]
        # keep both signs present so the form has solutions
        if all(c > 0 for c in coeffs) or all(c < 0 for c in coeffs):
            coeffs[-1] = -coeffs[-1]
        n = int(rng.integers(1, 31))
        den = int(rng.integers(1, 10))
        f = WeightFn(tuple(Fraction(int(rng.integers(0, den + 1)), den) for _ in range(n)))
        L = LinearForm(tuple(coeffs))
        fast = linear.count_via_convolution(linear.ConvolutionPlan.for_n(L, n), f)
        mismatches += fast != linear.weighted_count(L, f)
    dt = time.perf_counter() - t
    ok = mismatches == 0 and set(ks) == {3, 4, 5} and dt < 60
    assert report("3 counting oracle equivalence", ok, f"{100 - mismatches}/100 agree, {dt:.1f}s")


def test_4_discovery_loop(report):
    (ok, detail), dt = timed(reproduce.check_discovery)
    assert report("4 discovery loop", ok and dt < 120, f"{detail}, {dt:.1f}s")


def test_5_finite_n_witness(report):
    phi = quadrature.certificate_phi()
    pair = kernel.SymmetricPair(1, 2)
    assert decomp.witness_grid_step(pair, phi) == 400
    reports, dt = timed(lambda: decomp.scan_witness(pair, phi, 20000))
    hit = [r for r in reports if r.xi_value < 0 and r.deficit < 0]
    ok = bool(hit) and all(r.n % 400 == 0 for r in reports) and dt < 1800
    detail = f"n = {hit[0].n}, xi = {hit[0].xi_value}, deficit = {float(hit[0].deficit):.3e}" if hit else "none"
    assert report("5 finite-n witness", ok, f"{detail}, {dt:.1f}s")


def _planted_indefinite(rng, size):
    V = rng.integers(-4, 5, size=(size, size))
    w = rng.integers(-3, 4, size=size)
    if not w.any():
        w[0] = 1
    M = (V.T @ V).astype(object)
    vw = V @ w
    ww = int(w @ w)
    # w^T M w = |Vw|^2 - t |w|^4 < 0 once t exceeds |Vw|^2 / |w|^4
    t = int(vw @ vw) // (ww * ww) + 1
    return M - t * np.outer(w, w).astype(object)


def test_6_psd_checker(report):
    rng = np.random.default_rng(6)
    t = time.perf_counter()
    gram_ok = indef_ok = 0
    for _ in range(100):
        rows, size = int(rng.integers(1, 31)), int(rng.integers(1, 31))
        V = rng.integers(-5, 6, size=(rows, size))
        gram_ok += decomp.is_psd((V.T @ V).tolist()).psd
    for _ in range(100):
        M = _planted_indefinite(rng, int(rng.integers(2, 31)))
        res = decomp.is_psd(M.tolist())
        if not res.psd:
            v = [Fraction(x) for x in res.certificate]
            val = decomp.quadratic_value([[Fraction(int(x)) for x in row] for row in M], v)
            indef_ok += val < 0 and val == res.value
    dt = time.perf_counter() - t
    ok = gram_ok == 100 and indef_ok == 100 and dt < 60
    assert report("6 PSD checker soundness", ok,
                  f"gram {gram_ok}/100 psd, planted {indef_ok}/100 certified, {dt:.1f}s")


def test_7_coloring_calibration(report):
    t = time.perf_counter()
    small = {}
    for n in (8, 10, 12, 14):
        exact = coloropt.brute_min(SCHUR, n).min_count
        found = coloropt.local_search(SCHUR, n, restarts=32, seed=0).best_count
        small[n] = (found, exact)
    schur = coloropt.local_search(SCHUR, 600, restarts=4, seed=0).best_count / 600 ** 2
    ap = coloropt.local_search(THREE_AP, 600, restarts=4, seed=0).best_count / 600 ** 2
    dt = time.perf_counter() - t
    ok = all(a == b for a, b in small.values()) and schur <= 0.100 and ap <= 0.115 and dt < 600
    detail = (f"small n (found, exact) {small}; n=600 Schur {schur:.4f}, "
              f"x-2y+z {ap:.4f}, {dt:.1f}s")
    assert report("7 coloring calibration", ok, detail)


def test_8_supersaturation_growth(report):
    (ok, detail), dt = timed(reproduce.check_growth)
    assert report("8 supersaturation growth", ok and dt < 600, f"{detail}, {dt:.1f}s")


def test_9_rado_blocks(report):
    t = time.perf_counter()
    cert = coloropt.rado_threshold(SCHUR, r=2)
    rng = np.random.default_rng(9)
    n = 100
    limit = coloropt.surviving_block_threshold(cert.N0, n)
    verified = 0
    for _ in range(1000):
        c = linear.Coloring(tuple(int(x) for x in rng.integers(0, 2, size=n)))
        max_drop = int(np.ceil(n - limit)) - 1
        drop = rng.choice(np.arange(1, n + 1), size=int(rng.integers(0, max_drop + 1)), replace=False)
        A = set(range(1, n + 1)) - {int(x) for x in drop}
        assert len(A) > limit
        block = coloropt.find_surviving_block(cert, c, A)
        xs = block.solution
        verified += (set(xs) <= A and xs[0] + xs[1] == xs[2]
                     and len({c.color_of(x) for x in xs}) == 1)
    dt = time.perf_counter() - t
    ok = cert.N0 == 5 and verified == 1000 and dt < 120
    assert report("9 Rado certificate", ok, f"N0 = {cert.N0}, {verified}/1000 blocks verified, {dt:.1f}s")


def _suite():
    rng = np.random.default_rng(10)
    cuts = sorted({Fraction(int(x), 7) for x in rng.integers(1, 7, size=4)})
    return {
        "certificate": quadrature.certificate_phi(),
        "constant": quadrature.StepFunction.constant(1),
        "halves": quadrature.StepFunction((0, Fraction(1, 2), 1), (1, -1)),
        "thirds": quadrature.StepFunction((0, Fraction(1, 3), Fraction(2, 3), 1), (2, -3, 1)),
        "sevenths": quadrature.StepFunction([0, *cuts, 1],
                                            [int(v) for v in rng.integers(-5, 6, size=len(cuts) + 1)]),
    }


def test_10_kernel_properties(report):
    t = time.perf_counter()
    grid = [Fraction(i, 120) for i in range(121)]
    sym_bad = cont_bad = 0
    delta = Fraction(1, 10 ** 6)
    for pair in ((1, 2), (1, 3), (2, 3), (3, 5)):
        lip = kernel.lipschitz_constant(pair)
        terms = kernel.summands(pair)
        for u in grid:
            for v in grid:
                h = kernel.H(pair, u, v)
                sym_bad += h != kernel.H(pair, v, u)
                # the piecewise formulas agree with the (continuous) ramp form
                cont_bad += h != sum(s(u, v) for s in terms)
                for du, dv in ((delta, 0), (-delta, 0), (0, delta), (0, -delta)):
                    if 0 <= u + du <= 1 and 0 <= v + dv <= 1:
                        cont_bad += abs(kernel.H(pair, u + du, v + dv) - h) > lip * delta
    rates = {}
    conv_ok = True
    for name, phi in _suite().items():
        exact = float(quadrature.integrate_quadratic((1, 2), phi))
        scaled = []
        for N in (100, 200, 400, 800):
            err = abs(quadrature.riemann_estimate((1, 2), phi, N) - exact)
            conv_ok &= err <= quadrature.riemann_error_bound((1, 2), phi, N)
            scaled.append(err * N)
        rates[name] = max(scaled)
    dt = time.perf_counter() - t
    ok = sym_bad == 0 and cont_bad == 0 and conv_ok and dt < 120
    detail = (f"symmetry defects {sym_bad}, continuity defects {cont_bad}, "
              f"max N*error {', '.join(f'{k} {v:.3g}' for k, v in rates.items())}, {dt:.1f}s")
    assert report("10 kernel properties", ok, detail)
