"""Exact double integrals of H_{a,b} against step functions.

On a rectangle [u0,u1] x [v0,v1] a summand g(p*u + q*v + r) integrates to

    (G(p*u1+q*v1+r) - G(p*u1+q*v0+r) - G(p*u0+q*v1+r) + G(p*u0+q*v0+r)) / (p*q)

where G'' = g.  Writing g = sum_k c_k (x - t_k)_+ gives G = sum_k c_k (x - t_k)_+^3 / 6,
which is C^1 across every breakpoint, so the corner formula holds on any cell.
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .kernel import H_array, _as_pair, lipschitz_constant, summands


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function on [0,1]: ``values[i]`` on [breakpoints[i], breakpoints[i+1])."""

    breakpoints: tuple
    values: tuple

    def __post_init__(self):
        bps = tuple(Fraction(t) for t in self.breakpoints)
        vals = tuple(Fraction(v) for v in self.values)
        if len(vals) < 1 or len(bps) != len(vals) + 1:
            raise ValueError("need m >= 1 values and m + 1 breakpoints")
        if bps[0] != 0 or bps[-1] != 1:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(s >= t for s, t in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, c):
        return cls((0, 1), (c,))

    def __len__(self):
        return len(self.values)

    def __call__(self, x):
        x = Fraction(x)
        if x < 0 or x > 1:
            raise ValueError(f"{x} outside [0, 1]")
        for t, v in zip(self.breakpoints[1:], self.values):
            if x < t:
                return v
        return self.values[-1]

    def scaled(self, c):
        c = Fraction(c)
        return StepFunction(self.breakpoints, tuple(c * v for v in self.values))

    def refine(self, points):
        """Same function on the union of its breakpoints and ``points``."""
        bps = sorted(set(self.breakpoints) | {Fraction(p) for p in points})
        return StepFunction(bps, tuple(self(t) for t in bps[:-1]))

    def __add__(self, other):
        bps = sorted(set(self.breakpoints) | set(other.breakpoints))
        return StepFunction(bps, tuple(self(t) + other(t) for t in bps[:-1]))

    def merged(self):
        """Drop breakpoints between equal neighbouring values."""
        bps, vals = [self.breakpoints[0]], []
        for t, v in zip(self.breakpoints[1:], self.values):
            if vals and vals[-1] == v:
                bps[-1] = t
            else:
                vals.append(v)
                bps.append(t)
        return StepFunction(bps, vals)

    def common_denominator(self):
        d = 1
        for t in self.breakpoints:
            d = lcm(d, t.denominator)
        return int(d)

    def l1_norm(self):
        return sum((abs(v) * (t1 - t0) for v, t0, t1 in
                    zip(self.values, self.breakpoints, self.breakpoints[1:])), Fraction(0))

    def sup_norm(self):
        return max(abs(v) for v in self.values)

    def sample(self, x):
        """Float values at an array of points in [0, 1]."""
        edges = np.array([float(t) for t in self.breakpoints[1:-1]])
        idx = np.searchsorted(edges, np.asarray(x, dtype=float), side="right")
        return np.array([float(v) for v in self.values])[idx]

    def to_json(self):
        return {
            "breakpoints": [_frac_obj(t) for t in self.breakpoints],
            "values": [_frac_obj(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            tuple(_obj_frac(t) for t in obj["breakpoints"]),
            tuple(_obj_frac(v) for v in obj["values"]),
        )

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _frac_obj(x):
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def _obj_frac(o):
    if isinstance(o, dict):
        return Fraction(int(o["num"]), int(o["den"]))
    return Fraction(o)


def _second_antiderivative(ramps, x):
    total = Fraction(0)
    for t, c in ramps:
        if x > t:
            d = x - t
            total += c * d * d * d
    return total / 6


def cell_integral(pair, u0, u1, v0, v1):
    """Exact integral of H_{a,b} over the rectangle [u0,u1] x [v0,v1]."""
    total = Fraction(0)
    for s in summands(pair):
        G = s.ramps
        corner = (
            _second_antiderivative(G, s.p * u1 + s.q * v1 + s.r)
            - _second_antiderivative(G, s.p * u1 + s.q * v0 + s.r)
            - _second_antiderivative(G, s.p * u0 + s.q * v1 + s.r)
            + _second_antiderivative(G, s.p * u0 + s.q * v0 + s.r)
        )
        total += s.scale * corner / (s.p * s.q)
    return total


def integrate_bilinear(pair, phi, psi):
    """Exact value of the double integral of H(u,v) phi(u) psi(v) over [0,1]^2."""
    pair = _as_pair(pair)
    total = Fraction(0)
    for i, fu in enumerate(phi.values):
        if fu == 0:
            continue
        u0, u1 = phi.breakpoints[i], phi.breakpoints[i + 1]
        for j, gv in enumerate(psi.values):
            if gv == 0:
                continue
            v0, v1 = psi.breakpoints[j], psi.breakpoints[j + 1]
            total += fu * gv * cell_integral(pair, u0, u1, v0, v1)
    return total


def integrate_quadratic(pair, phi):
    """Exact quadratic form of H against phi (uses the symmetry of H to halve the work)."""
    pair = _as_pair(pair)
    m = len(phi)
    bps, vals = phi.breakpoints, phi.values
    total = Fraction(0)
    for i in range(m):
        if vals[i] == 0:
            continue
        for j in range(i, m):
            if vals[j] == 0:
                continue
            c = vals[i] * vals[j] * cell_integral(pair, bps[i], bps[i + 1], bps[j], bps[j + 1])
            total += c if i == j else 2 * c
    return total


def riemann_estimate(pair, phi, N):
    """Midpoint-rule float estimate of :func:`integrate_quadratic` on an N x N grid."""
    if N < 8:
        raise ValueError("resolution N must be at least 8")
    x = (np.arange(N) + 0.5) / N
    w = phi.sample(x)
    total = 0.0
    # row blocks keep memory at O(block * N)
    block = max(1, 4_000_000 // N)
    for start in range(0, N, block):
        rows = H_array(pair, x[start:start + block, None], x[None, :])
        total += float(w[start:start + block] @ rows @ w)
    return total / (N * N)


def riemann_error_bound(pair, phi, N):
    """Bound C * |phi|_inf^2 / N on |riemann_estimate - integrate_quadratic|.

    On a grid cell the midpoint value of H is within Lip(H)/N of every other
    value (half a cell in each coordinate), giving the Lip(H) part of C.  When
    N is not a multiple of phi's breakpoint denominator, cells straddling a
    breakpoint of phi take one side's value; there are at most 2*m*N of them,
    each off by at most 2*sup(H)*|phi|_inf^2/N^2.
    """
    pair = _as_pair(pair)
    lip = float(lipschitz_constant(pair))
    sup = float(phi.sup_norm())
    C = lip
    if N % phi.common_denominator():
        h_sup = 4.0 / pair.b + 1.0 / pair.b + 1.0 / pair.a
        C += 4 * len(phi) * h_sup
    return C * sup * sup / N


def certificate_phi():
    """The 13-piece step certificate for (a, b) = (1, 2), breakpoints at multiples of 1/200."""
    cuts = (0, 7, 16, 33, 67, 84, 93, 107, 116, 133, 167, 184, 193, 200)
    vals = (-2, 10, -18, 15, -19, 9, -4, 9, -19, 15, -18, 10, -2)
    return StepFunction(tuple(Fraction(c, 200) for c in cuts), vals)
