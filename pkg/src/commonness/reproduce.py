"""Headline reproduction checks run by ``commonness verify-paper``."""

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coloropt import growth_table
from .decomp import balanced_sum, quartic_form, xi, build_matrix
from .eigsearch import discover
from .linear import SCHUR, WeightFn
from .quadrature import integrate_quadratic, certificate_phi

CERTIFIED_VALUE = Fraction(-120959, 1600000)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


def random_signed_f(rng, n, max_den=12):
    """Rational f: [n] -> [-1/2, 1/2] with denominators up to max_den."""
    dens = rng.integers(1, max_den + 1, size=n)
    nums = [int(rng.integers(-d // 2, d // 2 + 1)) for d in dens]
    return WeightFn(tuple(Fraction(a, int(d)) for a, d in zip(nums, dens)), "signed")


def check_certificate():
    value = integrate_quadratic((1, 2), certificate_phi())
    return value == CERTIFIED_VALUE, f"integral = {value}"


def check_decomposition(pairs=((1, 2), (1, 3), (2, 3)), ns=(8, 20, 40), per_case=50, seed=0):
    rng = np.random.default_rng(seed)
    bad = 0
    total = 0
    for pair in pairs:
        for n in ns:
            m = build_matrix(pair, n)
            for _ in range(per_case):
                f = random_signed_f(rng, n)
                residual = balanced_sum(pair, f) - Fraction(1, 8) - xi(m, f)
                quartic = quartic_form(pair, f)
                doubled = balanced_sum(pair, f.scaled(2)) - Fraction(1, 8) - xi(m, f.scaled(2))
                total += 1
                if not (residual == quartic and residual >= 0 and doubled == 16 * residual):
                    bad += 1
    return bad == 0, f"{total - bad}/{total} instances exact"


def check_discovery(N=200):
    eig, cert = discover((1, 2), N)
    ok = eig.lambda_min < 0 and cert.value < 0
    return ok, f"lambda_min = {eig.lambda_min:.6f}, certified value = {cert.value} ({len(cert.phi)} pieces)"


def check_growth(ns=(100, 200, 400, 800), lo=1.8, hi=2.2):
    table = growth_table(SCHUR, ns)
    ratios = table.log2_ratios()
    ok = all(r is not None and lo <= r <= hi for r in ratios)
    counts = ", ".join(f"{row.n}:{row.best_count}" for row in table.rows)
    return ok, f"counts {counts}; log2 ratios {[round(r, 3) for r in ratios]}"


HEADLINE = (
    ("1 exact certificate", check_certificate),
    ("2 decomposition identity", check_decomposition),
    ("4 discovery loop", check_discovery),
    ("8 supersaturation growth", check_growth),
)


def run_headline():
    out = []
    for name, fn in HEADLINE:
        t = time.perf_counter()
        ok, detail = fn()
        out.append(Check(name, bool(ok), detail, time.perf_counter() - t))
    return out
