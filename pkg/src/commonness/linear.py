"""Linear forms, weight functions, colorings and exact solution counting.

Two independent counting routes are provided:

* :func:`weighted_count` enumerates x_1..x_{k-1} and solves for x_k (naive).
* :func:`count_via_convolution` multiplies the k coefficient-dilated
  sequences as big-integer polynomials (Kronecker substitution) in the cyclic
  group Z/NZ and reads off the coefficient at 0.

Rational inputs are scaled to integers by a common denominator before any
arithmetic, and divided back once at the end.
"""

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm


class ModulusTooSmall(ValueError):
    pass


class NoSolutions(ZeroDivisionError):
    """T_L(1) = 0, i.e. n is below the solvability threshold of the form."""


@dataclass(frozen=True)
class LinearForm:
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) < 2:
            raise ValueError("a linear form needs at least two coefficients")
        if any(c == 0 for c in coeffs):
            raise ValueError(f"coefficients must be nonzero: {coeffs}")
        if not (any(c > 0 for c in coeffs) and any(c < 0 for c in coeffs)):
            raise ValueError(f"need a positive and a negative coefficient: {coeffs}")

    @property
    def k(self):
        return len(self.coeffs)

    @property
    def positive_mass(self):
        return sum(c for c in self.coeffs if c > 0)

    @property
    def negative_mass(self):
        return -sum(c for c in self.coeffs if c < 0)

    def min_modulus(self, n):
        """Smallest N for which a zero residue mod N forces a zero sum on [n]^k."""
        P, Q = self.positive_mass, self.negative_mass
        return max(P * n - Q, Q * n - P) + 1

    @classmethod
    def parse(cls, text):
        return cls(tuple(int(t) for t in str(text).split(",")))

    def __str__(self):
        return ",".join(str(c) for c in self.coeffs)


SCHUR = LinearForm((1, 1, -1))
THREE_AP = LinearForm((1, -2, 1))


@dataclass(frozen=True)
class WeightFn:
    """Rational function on [n], stored as ``values[x - 1]``.

    ``mode="probability"`` enforces values in [0, 1]; ``mode="signed"`` allows any rational.
    """

    values: tuple
    mode: str = "probability"

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if self.mode not in ("probability", "signed"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not vals:
            raise ValueError("n must be positive")
        if self.mode == "probability" and any(v < 0 or v > 1 for v in vals):
            raise ValueError("probability-mode weights must lie in [0, 1]")

    @property
    def n(self):
        return len(self.values)

    @classmethod
    def constant(cls, n, c, mode="probability"):
        return cls((Fraction(c),) * n, mode)

    @classmethod
    def indicator(cls, n, subset):
        s = set(subset)
        return cls(tuple(Fraction(int(x in s)) for x in range(1, n + 1)))

    def complement(self):
        return WeightFn(tuple(1 - v for v in self.values), self.mode)

    def scaled(self, c):
        return WeightFn(tuple(Fraction(c) * v for v in self.values), "signed")

    def shifted(self, c):
        """c + self, in probability mode when that is valid."""
        vals = tuple(Fraction(c) + v for v in self.values)
        mode = "probability" if all(0 <= v <= 1 for v in vals) else "signed"
        return WeightFn(vals, mode)

    def integer_scaling(self):
        """(ints, D) with values[i] == ints[i] / D."""
        D = lcm(*(v.denominator for v in self.values))
        return [int(v * D) for v in self.values], D

    def to_json(self):
        return {
            "n": self.n,
            "mode": self.mode,
            "values": [{"num": v.numerator, "den": v.denominator} for v in self.values],
        }

    @classmethod
    def from_json(cls, obj):
        vals = tuple(Fraction(int(o["num"]), int(o["den"])) for o in obj["values"])
        if int(obj["n"]) != len(vals):
            raise ValueError("n does not match the number of values")
        return cls(vals, obj.get("mode", "probability"))


@dataclass(frozen=True)
class Coloring:
    colors: tuple
    r: int = 2

    def __post_init__(self):
        cols = tuple(int(c) for c in self.colors)
        object.__setattr__(self, "colors", cols)
        if not cols:
            raise ValueError("n must be positive")
        if self.r < 1 or any(c < 0 or c >= self.r for c in cols):
            raise ValueError(f"colors must lie in [0, {self.r - 1}]")

    @property
    def n(self):
        return len(self.colors)

    def color_of(self, x):
        return self.colors[x - 1]

    def classes(self):
        out = [[] for _ in range(self.r)]
        for x, c in enumerate(self.colors, start=1):
            out[c].append(x)
        return out

    def indicator(self, color):
        return WeightFn(tuple(Fraction(int(c == color)) for c in self.colors))

    def to_json(self):
        return {"n": self.n, "r": self.r, "colors": list(self.colors)}

    @classmethod
    def from_json(cls, obj):
        c = cls(tuple(obj["colors"]), int(obj.get("r", 2)))
        if int(obj["n"]) != c.n:
            raise ValueError("n does not match the number of colors")
        return c


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# big-integer polynomial arithmetic


def _pack(coeffs, width):
    """Evaluate sum c_i * 2^(width*i) for signed integer coefficients."""
    nbytes = width // 8
    pos = b"".join((c if c > 0 else 0).to_bytes(nbytes, "little") for c in coeffs)
    neg = b"".join((-c if c < 0 else 0).to_bytes(nbytes, "little") for c in coeffs)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _unpack(value, width, length):
    nbytes = width // 8
    half = 1 << (width - 1)
    bias = int.from_bytes((b"\x00" * (nbytes - 1) + b"\x80") * length, "little")
    raw = (value + bias).to_bytes(nbytes * length + 1, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half
            for i in range(length)]


def poly_mul(p, q):
    """Exact product of integer coefficient lists via one big-integer multiplication."""
    if not p or not q:
        return []
    bound = max(map(abs, p)) * max(map(abs, q)) * min(len(p), len(q))
    if bound == 0:
        return [0] * (len(p) + len(q) - 1)
    width = -(-(bound.bit_length() + 2) // 8) * 8
    return _unpack(_pack(p, width) * _pack(q, width), width, len(p) + len(q) - 1)


def _cyclic_fold(seq, N):
    out = [0] * N
    for i, c in enumerate(seq):
        if c:
            out[i % N] += c
    return out


def _dilated(ints, coeff, N):
    """Sequence over Z/NZ with ints[x-1] placed at coeff * x mod N."""
    out = [0] * N
    for x, v in enumerate(ints, start=1):
        if v:
            out[(coeff * x) % N] += v
    return out


def _dilated_linear(ints, coeff):
    """Sequence indexed by coeff * x - min_x(coeff * x), for x in [n], coeff != 0."""
    n = len(ints)
    if coeff > 0:
        out = [0] * (coeff * (n - 1) + 1)
        for x, v in enumerate(ints, start=1):
            out[coeff * (x - 1)] = v
    else:
        out = [0] * (-coeff * (n - 1) + 1)
        for x, v in enumerate(ints, start=1):
            out[-coeff * (n - x)] = v
    return out


@dataclass(frozen=True)
class ConvolutionPlan:
    modulus: int
    form: LinearForm

    @classmethod
    def for_n(cls, form, n, modulus=None):
        if modulus is None:
            modulus = sum(abs(c) for c in form.coeffs) * n + 1
        return cls(int(modulus), form)

    def check(self, n):
        if self.modulus < self.form.min_modulus(n):
            raise ModulusTooSmall(
                f"modulus {self.modulus} wraps around for {self.form} on [{n}]; "
                f"need at least {self.form.min_modulus(n)}")


def _is_symmetric_four_term(form):
    c = form.coeffs
    return len(c) == 4 and c[2] == -c[0] and c[3] == -c[1] and c[0] > 0 and c[1] > 0


def pair_sum_counts(ints_x, ints_y, a, b):
    """h[s] = sum over a*x + b*y = s + a + b of ints_x[x-1] * ints_y[y-1], for a, b > 0."""
    return poly_mul(_dilated_linear(ints_x, a), _dilated_linear(ints_y, b))


def _integer_count_cyclic(plan, ints):
    N = plan.modulus
    form = plan.form
    if _is_symmetric_four_term(form):
        a, b = form.coeffs[0], form.coeffs[1]
        # fold is the identity once the plan passes its check; kept so that a
        # too-small modulus can only ever make this path wrong, never silently right
        h = _cyclic_fold(pair_sum_counts(ints, ints, a, b), N)
        return sum(v * v for v in h)
    acc = None
    for c in form.coeffs:
        seq = _dilated(ints, c, N)
        acc = seq if acc is None else _cyclic_fold(poly_mul(acc, seq), N)
    return acc[0]


def count_via_convolution(plan, f):
    """T_L(f) computed by convolution over Z/NZ; equals :func:`weighted_count` exactly."""
    if isinstance(f, int):
        f = WeightFn.constant(f, 1)
    plan.check(f.n)
    ints, D = f.integer_scaling()
    return Fraction(_integer_count_cyclic(plan, ints), D ** plan.form.k)


def integer_count(form, ints):
    """T_L on an integer-valued sequence indexed by [len(ints)]."""
    return _integer_count_cyclic(ConvolutionPlan.for_n(form, len(ints)), list(ints))


def count_solutions(L, n):
    """|{x in [n]^k : L(x) = 0}|."""
    if n < 1:
        raise ValueError("n must be positive")
    return integer_count(L, [1] * n)


NAIVE_MAX_K = 6


def _naive_integer_count(coeffs, ints):
    n = len(ints)
    *head, last = coeffs
    total = 0
    for xs in itertools.product(range(1, n + 1), repeat=len(head)):
        s = 0
        w = 1
        for c, x in zip(head, xs):
            s += c * x
            w *= ints[x - 1]
            if w == 0:
                break
        if w == 0 or s % last:
            continue
        xk = -s // last
        if 1 <= xk <= n:
            total += w * ints[xk - 1]
    return total


def weighted_count(L, f):
    """T_L(f) = sum over solutions in [n]^k of f(x_1)...f(x_k), by direct enumeration.

    Forms with more than six variables fall back to the convolution route.
    """
    ints, D = f.integer_scaling()
    if L.k > NAIVE_MAX_K:
        return count_via_convolution(ConvolutionPlan.for_n(L, f.n), f)
    return Fraction(_naive_integer_count(L.coeffs, ints), D ** L.k)


def fast_count(L, f):
    """T_L(f) exactly via the default convolution plan."""
    return count_via_convolution(ConvolutionPlan.for_n(L, f.n), f)


def t_density(L, f):
    total = count_solutions(L, f.n)
    if total == 0:
        raise NoSolutions(f"{L} has no solutions in [{f.n}]")
    return fast_count(L, f) / total


def mono_count(L, c):
    """Number of solutions in [n]^k whose coordinates all share one color."""
    return sum(integer_count(L, [int(col == j) for col in c.colors]) for j in range(c.r))


def deficit(L, f):
    """t_L(f) + t_L(1 - f) - 2^(1-k); negative values witness uncommonness at this n."""
    if f.mode != "probability":
        raise ValueError("deficit needs a probability-mode weight function")
    total = count_solutions(L, f.n)
    if total == 0:
        raise NoSolutions(f"{L} has no solutions in [{f.n}]")
    both = fast_count(L, f) + fast_count(L, f.complement())
    return both / total - Fraction(2, 2 ** L.k)
