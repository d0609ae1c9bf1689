"""The symmetric kernel H_{a,b} on [0,1]^2 and its two tent-shaped building blocks.

Everything here is exact: arguments may be ``Fraction`` or ``int`` and the
result is a ``Fraction``.  Float evaluation for large grids lives in
:func:`H_array`.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np


@dataclass(frozen=True)
class SymmetricPair:
    """Coprime 1 <= a < b, standing for a*x1 + b*x2 - a*x3 - b*x4 = 0."""

    a: int
    b: int

    def __post_init__(self):
        if not (isinstance(self.a, int) and isinstance(self.b, int)):
            raise TypeError("pair entries must be integers")
        if not 1 <= self.a < self.b:
            raise ValueError(f"need 1 <= a < b, got ({self.a}, {self.b})")
        if gcd(self.a, self.b) != 1:
            raise ValueError(f"a and b must be coprime, got ({self.a}, {self.b})")

    @property
    def coeffs(self):
        return (self.a, self.b, -self.a, -self.b)

    @classmethod
    def parse(cls, text):
        a, b = (int(t) for t in str(text).split(","))
        return cls(a, b)

    def __str__(self):
        return f"{self.a},{self.b}"


KernelParams = SymmetricPair


def _as_pair(pair):
    if isinstance(pair, SymmetricPair):
        return pair
    return SymmetricPair(*pair)


def alpha(pair, u):
    """Trapezoid supported on [0, a+b] with plateau 1/b on [a, b]."""
    pair = _as_pair(pair)
    a, b = pair.a, pair.b
    u = Fraction(u)
    if u < 0 or u > a + b:
        return Fraction(0)
    if u <= a:
        return u / (a * b)
    if u <= b:
        return Fraction(1, b)
    return (a + b - u) / (a * b)


def beta(u):
    """Unit tent on [-1, 1]."""
    u = Fraction(u)
    if u < -1 or u > 1:
        return Fraction(0)
    if u <= 0:
        return u + 1
    return 1 - u


# Each continuous piecewise-linear tent g is stored as its slope changes:
# g(x) = sum_k c_k * (x - t_k)_+ , which is what quadrature integrates twice.

def alpha_ramps(pair):
    pair = _as_pair(pair)
    a, b = pair.a, pair.b
    s = Fraction(1, a * b)
    return ((Fraction(0), s), (Fraction(a), -s), (Fraction(b), -s), (Fraction(a + b), s))


def beta_ramps():
    return ((Fraction(-1), Fraction(1)), (Fraction(0), Fraction(-2)), (Fraction(1), Fraction(1)))


def eval_ramps(ramps, x):
    x = Fraction(x)
    return sum((c * (x - t) for t, c in ramps if x > t), Fraction(0))


@dataclass(frozen=True)
class Summand:
    """One term scale * g(p*u + q*v + r) of H, with g given by its ramps."""

    name: str
    scale: Fraction
    p: Fraction
    q: Fraction
    r: Fraction
    ramps: tuple

    def __call__(self, u, v):
        return self.scale * eval_ramps(self.ramps, self.p * u + self.q * v + self.r)


def summands(pair):
    """The six terms of H_{a,b}(u, v) as affine arguments fed into alpha or beta."""
    pair = _as_pair(pair)
    a, b = Fraction(pair.a), Fraction(pair.b)
    al, be = alpha_ramps(pair), beta_ramps()
    one, zero = Fraction(1), Fraction(0)
    return (
        Summand("alpha(au+bv)", one, a, b, zero, al),
        Summand("alpha(av+bu)", one, b, a, zero, al),
        Summand("alpha(a(1-v)+bu)", one, b, -a, a, al),
        Summand("alpha(a(1-u)+bv)", one, -a, b, a, al),
        Summand("beta(a(u-v)/b)/b", 1 / b, a / b, -a / b, zero, be),
        Summand("beta(b(u-v)/a)/a", 1 / a, b / a, -b / a, zero, be),
    )


def H(pair, u, v):
    """Exact H_{a,b}(u, v) for u, v in [0, 1]."""
    pair = _as_pair(pair)
    u, v = Fraction(u), Fraction(v)
    if not (0 <= u <= 1 and 0 <= v <= 1):
        raise ValueError(f"H is defined on [0,1]^2, got ({u}, {v})")
    a, b = pair.a, pair.b
    return (
        alpha(pair, a * u + b * v)
        + alpha(pair, a * v + b * u)
        + alpha(pair, a * (1 - v) + b * u)
        + alpha(pair, a * (1 - u) + b * v)
        + beta(a * (u - v) / b) / b
        + beta(b * (u - v) / a) / a
    )


def breaklines(pair):
    """Lines p*u + q*v = c along which some summand of H changes slope.

    Returned as sorted, de-duplicated (p, q, c) triples with the affine offset
    folded into c.
    """
    lines = set()
    for s in summands(pair):
        for t, _ in s.ramps:
            lines.add((s.p, s.q, t - s.r))
    return sorted(lines)


def lipschitz_constant(pair):
    """Upper bound on |dH/du| (equal to the bound on |dH/dv| by symmetry)."""
    total = Fraction(0)
    for s in summands(pair):
        slope, max_slope = Fraction(0), Fraction(0)
        for _, c in s.ramps:
            slope += c
            max_slope = max(max_slope, abs(slope))
        total += abs(s.scale * s.p) * max_slope
    return total


def _alpha_np(a, b, x):
    return np.clip(np.minimum(b, x) - np.maximum(x - a, 0.0), 0.0, None) / (a * b)


def _beta_np(x):
    return np.clip(1.0 - np.abs(x), 0.0, None)


def H_array(pair, u, v):
    """Vectorised float H over broadcastable arrays u, v."""
    pair = _as_pair(pair)
    a, b = float(pair.a), float(pair.b)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return (
        _alpha_np(a, b, a * u + b * v)
        + _alpha_np(a, b, a * v + b * u)
        + _alpha_np(a, b, a * (1 - v) + b * u)
        + _alpha_np(a, b, a * (1 - u) + b * v)
        + _beta_np(a * (u - v) / b) / b
        + _beta_np(b * (u - v) / a) / a
    )
