"""Quadratic/quartic split of t_L(1/2+f) + t_L(1/2-f) for a*x1 + b*x2 - a*x3 - b*x4.

With g = 1/2 +- f the pair sums h_g(s) = sum_{a x + b y = s} g(x) g(y) expand as
h0 +- h1 + h2, where h0 comes from the constant 1/2, h2 from f alone and h1 is
the mixed term.  Summing the squares over s for both signs,

    T(1/2+f) + T(1/2-f) - 2 T(1/2) = [4 <h0, h2> + 2 <h1, h1>] + 2 <h2, h2>,

the first bracket being T_L(1) * xi(f) and the last 2 T_L(f) = T_L(1) * zeta(f).
:func:`xi_fast` and :func:`witness_uncommon` evaluate exactly these sums; the
matrix route (:func:`build_matrix`) counts lattice points instead.
"""

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

import numpy as np

from .kernel import SymmetricPair, _as_pair
from .linear import (ConvolutionPlan, LinearForm, WeightFn, count_solutions,
                     count_via_convolution, pair_sum_counts)
from .quadrature import StepFunction


def form_of(pair):
    return LinearForm(_as_pair(pair).coeffs)


def _signed(f):
    if isinstance(f, WeightFn):
        return f
    return WeightFn(tuple(f), "signed")


# ---------------------------------------------------------------------------
# lattice-point completion counts


@dataclass
class PairCounts:
    """For each ordered pair (p, q) in [n]^2, how many ways the other two variables complete a solution.

    Table names give the two fixed variables of a x + b y = a x' + b y'.
    Index [p-1, q-1].
    """

    pair: SymmetricPair
    n: int
    xy: np.ndarray
    xx: np.ndarray
    xy2: np.ndarray
    yx: np.ndarray
    yy: np.ndarray
    x2y2: np.ndarray

    def tables(self):
        return {"x,y": self.xy, "x,x'": self.xx, "x,y'": self.xy2,
                "y,x'": self.yx, "y,y'": self.yy, "x',y'": self.x2y2}

    def A(self):
        return self.xy + self.xx + self.xy2 + self.yx + self.yy + self.x2y2


def _representations(a, b, n):
    """r[s] = #{(x, y) in [n]^2 : a x + b y = s} for 0 <= s <= (a+b) n."""
    ones = np.ones(n, dtype=np.int64)
    da = np.zeros(a * n + 1, dtype=np.int64)
    da[a * np.arange(1, n + 1)] = ones
    db = np.zeros(b * n + 1, dtype=np.int64)
    db[b * np.arange(1, n + 1)] = ones
    return np.convolve(da, db)


def _differences(a, b, n):
    """d[t + b n] = #{(u, v) in [n]^2 : a u - b v = t}."""
    ones = np.ones(n, dtype=np.int64)
    da = np.zeros(a * n + 1, dtype=np.int64)
    da[a * np.arange(1, n + 1)] = ones
    db = np.zeros(b * n + 1, dtype=np.int64)
    db[b * n - b * np.arange(1, n + 1)] = ones
    return np.convolve(da, db)


def pair_counts(pair, n):
    pair = _as_pair(pair)
    a, b = pair.a, pair.b
    p = np.arange(1, n + 1)[:, None]
    q = np.arange(1, n + 1)[None, :]
    reps = _representations(a, b, n)
    diffs = _differences(a, b, n)

    # (x, y) fixed: any (x', y') with a x' + b y' = a p + b q
    xy = reps[a * p + b * q]
    # (x', y') fixed: same count by symmetry of the equation
    x2y2 = xy.copy()
    # (x, x') fixed: b (y' - y) = a (p - q)
    d = p - q
    shift = np.where(d % b == 0, np.abs(a * d) // b, n)
    xx = np.where(d % b == 0, np.maximum(n - shift, 0), 0)
    # (y, y') fixed: a (x' - x) = b (p - q)
    shift = np.where(d % a == 0, np.abs(b * d) // a, n)
    yy = np.where(d % a == 0, np.maximum(n - shift, 0), 0)
    # (x, y') fixed: a x' - b y = a p - b q
    xy2 = diffs[a * p - b * q + b * n]
    # (y, x') fixed with y = p, x' = q: a x - b y' = a q - b p
    yx = diffs[a * q - b * p + b * n]
    return PairCounts(pair, n, xy, xx.astype(np.int64), xy2, yx, yy.astype(np.int64), x2y2)


# ---------------------------------------------------------------------------
# the matrix m_n^{(a,b)}


@dataclass
class QuadFormMatrix:
    """m = numer / denom with numer = A + A^T (integers) and denom = 4 T_L(1)."""

    pair: SymmetricPair
    n: int
    numer: np.ndarray
    denom: int

    @property
    def entries(self):
        return [[Fraction(int(v), self.denom) for v in row] for row in self.numer]

    def entry(self, x, y):
        return Fraction(int(self.numer[x - 1, y - 1]), self.denom)

    def is_symmetric(self):
        return bool((self.numer == self.numer.T).all())

    def export_text(self):
        """JSON header line followed by "x y num/den" triples for nonzero entries."""
        lines = [json.dumps({"a": self.pair.a, "b": self.pair.b, "n": self.n})]
        for x in range(self.n):
            for y in range(self.n):
                v = self.numer[x, y]
                if v:
                    lines.append(f"{x + 1} {y + 1} {Fraction(int(v), self.denom)}")
        return "\n".join(lines) + "\n"


def build_matrix(pair, n):
    pair = _as_pair(pair)
    total = count_solutions(form_of(pair), n)
    A = pair_counts(pair, n).A()
    return QuadFormMatrix(pair, n, A + A.T, 4 * total)


def rounded_entry_estimate(pair, n, x, y):
    """Closed form for 4 T_L(1) m[x, y] accurate up to O(1); a sanity check only."""
    pair = _as_pair(pair)
    a, b = pair.a, pair.b
    F = Fraction

    def pos(t):
        return max(t, F(0))

    def diag(d, mod, scale_num, scale_den):
        if (x - y) % mod:
            return F(0)
        t = F(scale_num * d, scale_den)
        return pos(min(F(n), t + n) - pos(t))

    val = (F(2, a) * pos(min(F(n), F(a * x + b * y, b)) - pos(F(a * x + b * y - a * n, b)))
           + F(2, a) * pos(min(F(n), F(a * y + b * x, b)) - pos(F(a * y + b * x - a * n, b)))
           + diag(x - y, b, a, b) + diag(y - x, b, a, b)
           + F(2, a) * pos(min(F(n), F(b * x - a * y + a * n, b)) - pos(F(b * x - a * y, b)))
           + F(2, a) * pos(min(F(n), F(b * y - a * x + a * n, b)) - pos(F(b * y - a * x, b)))
           + diag(x - y, a, b, a) + diag(y - x, a, b, a))
    return val


def xi(m, f):
    """f^T m f, exact."""
    f = _signed(f)
    if f.n != m.n:
        raise ValueError(f"dimension mismatch: f has n={f.n}, matrix has n={m.n}")
    ints, D = f.integer_scaling()
    v = np.array(ints, dtype=object)
    num = int(v @ (m.numer.astype(object) @ v))
    return Fraction(num, m.denom * D * D)


def _split_sums(pair, ints):
    """(2 T_L(1) xi(f), T_L(f)) for an integer-valued f (multiply f by D to use with rationals)."""
    a, b = pair.a, pair.b
    ones = [1] * len(ints)
    c1 = pair_sum_counts(ones, ones, a, b)
    h2 = pair_sum_counts(ints, ints, a, b)
    fa_ib = pair_sum_counts(ints, ones, a, b)
    ia_fb = pair_sum_counts(ones, ints, a, b)
    h1 = [s + t for s, t in zip(fa_ib, ia_fb)]
    # quadratic part of T(1/2+f)+T(1/2-f) is <c1, h2> + <h1, h1> / 2; h1 enters squared so
    # the 1/2 is kept exact by returning twice the value
    twice_quad = 2 * sum(u * v for u, v in zip(c1, h2)) + sum(v * v for v in h1)
    quartic = sum(v * v for v in h2)
    return twice_quad, quartic


def xi_fast(pair, f):
    """xi(f) by pair-sum convolutions, without forming the n x n matrix."""
    pair = _as_pair(pair)
    f = _signed(f)
    ints, D = f.integer_scaling()
    total = count_solutions(form_of(pair), f.n)
    twice_quad, _ = _split_sums(pair, ints)
    return Fraction(twice_quad, 2 * total * D * D)


def quartic_form(pair, f):
    """2 t_L(f): the sum-of-squares quartic remainder."""
    pair = _as_pair(pair)
    f = _signed(f)
    ints, D = f.integer_scaling()
    total = count_solutions(form_of(pair), f.n)
    _, quartic = _split_sums(pair, ints)
    return Fraction(2 * quartic, total * D ** 4)


def balanced_sum(pair, f):
    """t_L(1/2 + f) + t_L(1/2 - f), each count computed independently by convolution."""
    pair = _as_pair(pair)
    f = _signed(f)
    L = form_of(pair)
    plan = ConvolutionPlan.for_n(L, f.n)
    plus = WeightFn(tuple(Fraction(1, 2) + v for v in f.values), "signed")
    minus = WeightFn(tuple(Fraction(1, 2) - v for v in f.values), "signed")
    total = count_solutions(L, f.n)
    return (count_via_convolution(plan, plus) + count_via_convolution(plan, minus)) / total


def zeta(pair, n, f, m=None):
    """Residual t_L(1/2+f) + t_L(1/2-f) - 1/8 - xi(f); a nonnegative quartic form."""
    pair = _as_pair(pair)
    f = _signed(f)
    if f.n != n:
        raise ValueError(f"dimension mismatch: f has n={f.n}, expected {n}")
    q = xi(m, f) if m is not None else xi_fast(pair, f)
    return balanced_sum(pair, f) - Fraction(1, 8) - q


# ---------------------------------------------------------------------------
# exact positive semidefiniteness


@dataclass
class PSDResult:
    psd: bool
    certificate: list = None
    value: Fraction = None

    def __bool__(self):
        return self.psd


def quadratic_value(M, v):
    n = len(M)
    return sum((v[i] * M[i][j] * v[j] for i in range(n) for j in range(n) if v[i] and v[j]),
               Fraction(0))


def _integral_vector(v):
    D = lcm(*(Fraction(x).denominator for x in v))
    ints = [int(Fraction(x) * D) for x in v]
    g = gcd(*ints) or 1
    return [x // g for x in ints]


def is_psd(M):
    """Exact PSD test by symmetric elimination with diagonal pivoting.

    ``M`` is a square matrix of rationals (nested lists, numpy array or
    :class:`QuadFormMatrix`).  An indefinite verdict carries an integer vector
    v with v^T M v < 0, re-checked against the original matrix.
    """
    if isinstance(M, QuadFormMatrix):
        M = M.numer.tolist()
    orig = [[Fraction(x) for x in row] for row in M]
    n = len(orig)
    if any(len(row) != n for row in orig):
        raise ValueError("matrix must be square")
    if any(orig[i][j] != orig[j][i] for i in range(n) for j in range(i)):
        raise ValueError("matrix must be symmetric")
    S = [row[:] for row in orig]
    # rows of E satisfy (E M E^T)[i][i] == S[i][i] for rows still active
    E = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    active = list(range(n))

    def found(v):
        v = _integral_vector(v)
        val = quadratic_value(orig, v)
        if val >= 0:
            raise AssertionError("internal error: certificate failed re-verification")
        return PSDResult(False, v, val)

    while active:
        neg = next((i for i in active if S[i][i] < 0), None)
        if neg is not None:
            return found(E[neg])
        p = next((i for i in active if S[i][i] > 0), None)
        if p is None:
            for i in active:
                j = next((j for j in active if j != i and S[i][j] != 0), None)
                if j is not None:
                    t = -1 if S[i][j] > 0 else 1
                    return found([t * x + y for x, y in zip(E[i], E[j])])
            return PSDResult(True)
        active.remove(p)
        piv = S[p][p]
        rp = S[p]
        for i in active:
            c = S[i][p] / piv
            if c == 0:
                continue
            Si = S[i]
            for j in active:
                if rp[j]:
                    Si[j] -= c * rp[j]
            Si[p] = Fraction(0)
            Ei, Ep = E[i], E[p]
            for j in range(n):
                if Ep[j]:
                    Ei[j] -= c * Ep[j]
        for i in active:
            S[i][p] = Fraction(0)
    return PSDResult(True)


def psd_scan(pair, n_values):
    """Per-n exact verdicts for m_n^{(a,b)}; each entry is (n, PSDResult)."""
    return [(n, is_psd(build_matrix(pair, n))) for n in n_values]


# ---------------------------------------------------------------------------
# Fourier-side cross check


@dataclass
class FourierReport:
    xi_exact: Fraction
    zeta_exact: Fraction
    xi_fourier: float
    zeta_fourier: float
    tol: float

    @property
    def xi_error(self):
        return abs(self.xi_fourier - float(self.xi_exact))

    @property
    def zeta_error(self):
        return abs(self.zeta_fourier - float(self.zeta_exact))

    @property
    def ok(self):
        return (self.xi_error <= self.tol and self.zeta_error <= self.tol
                and self.zeta_fourier >= -self.tol)


def fourier_cross_check(pair, n, f, tol=1e-8):
    """Evaluate the frequency-space quadratic and quartic sums with a float DFT over Z/NZ, N = (a+b)n."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    pair = _as_pair(pair)
    f = _signed(f)
    if f.n != n:
        raise ValueError(f"dimension mismatch: f has n={f.n}, expected {n}")
    a, b = pair.a, pair.b
    N = (a + b) * n
    fz = np.zeros(N)
    fz[1:n + 1] = [float(v) for v in f.values]
    iz = np.zeros(N)
    iz[1:n + 1] = 1.0
    # hat g(chi_j) = E_x g(x) e^{-2 pi i j x / N}; the dilate a*chi is frequency a*j
    fh = np.fft.fft(fz) / N
    ih = np.fft.fft(iz) / N
    j = np.arange(N)
    Fa, Fb = fh[(a * j) % N], fh[(b * j) % N]
    Ia, Ib = ih[(a * j) % N], ih[(b * j) % N]
    cj = np.conj
    six = (abs(Ia) ** 2 * abs(Fb) ** 2 + abs(Fa) ** 2 * abs(Ib) ** 2
           + Ia * Ib * cj(Fa) * cj(Fb) + Ia * cj(Ib) * cj(Fa) * Fb
           + cj(Ia) * Ib * Fa * cj(Fb) + cj(Ia) * cj(Ib) * Fa * Fb)
    Xi = N ** 3 / 2 * six.sum().real
    Z = 2 * N ** 3 * (abs(Fa) ** 2 * abs(Fb) ** 2).sum()
    total = count_solutions(form_of(pair), n)
    return FourierReport(xi_fast(pair, f), quartic_form(pair, f), Xi / total, Z / total, tol)


# ---------------------------------------------------------------------------
# finite-n witnesses from a step function


class AlignmentError(ValueError):
    pass


@dataclass
class WitnessParams:
    pair: SymmetricPair
    phi: StepFunction
    n: int
    epsilon: Fraction = None

    def __post_init__(self):
        self.pair = _as_pair(self.pair)
        ab = self.pair.a * self.pair.b
        if self.n < 1 or self.n % ab:
            raise AlignmentError(f"n={self.n} must be a positive multiple of ab={ab}")
        blocks = self.n // ab
        for t in self.phi.breakpoints:
            if (t * blocks).denominator != 1:
                raise AlignmentError(f"breakpoint {t} splits a block of {ab} at n={self.n}")
        if self.epsilon is not None:
            self.epsilon = Fraction(self.epsilon)
            if self.epsilon <= 0:
                raise ValueError("epsilon must be positive")
            if self.epsilon * self.phi.sup_norm() > Fraction(1, 2):
                raise ValueError("1/2 +- epsilon * f_n leaves [0, 1]")


def witness_grid_step(pair, phi):
    """Smallest n-step keeping blocks aligned with phi's breakpoints: lcm(2ab, 2D)."""
    pair = _as_pair(pair)
    return lcm(2 * pair.a * pair.b, 2 * phi.common_denominator())


def block_function(params):
    """f_n constant on each block of ab consecutive integers, equal to phi's mean over the block."""
    ab = params.pair.a * params.pair.b
    n = params.n
    vals = []
    for i in range(n // ab):
        lo, hi = Fraction(ab * i, n), Fraction(ab * (i + 1), n)
        avg = params.phi(lo)
        # alignment makes phi constant on [lo, hi); the midpoint probe guards that
        if params.phi((lo + hi) / 2) != avg:
            raise AlignmentError(f"phi is not constant on block {i}")
        vals.extend([avg] * ab)
    return WeightFn(tuple(vals), "signed")


@dataclass
class WitnessReport:
    pair: SymmetricPair
    n: int
    xi_value: Fraction
    zeta_value: Fraction
    epsilon: Fraction
    deficit: Fraction

    @property
    def verdict(self):
        return "witness" if self.deficit < 0 else "no witness at this n"

    def to_json(self):
        return {
            "a": self.pair.a, "b": self.pair.b, "n": self.n,
            "xi": str(self.xi_value), "zeta": str(self.zeta_value),
            "epsilon": str(self.epsilon), "deficit": str(self.deficit),
            "verdict": self.verdict,
        }


def _choose_epsilon(xi_value, zeta_value, cap):
    if xi_value >= 0 or zeta_value == 0:
        return cap
    # minimiser of e^2 xi + e^4 zeta is e^2 = -xi / (2 zeta); any rational e with
    # e^2 < -xi/zeta keeps the deficit negative, so a float-guided choice is safe
    target = (-xi_value / (2 * zeta_value)) ** 0.5
    eps = Fraction(float(target)).limit_denominator(10 ** 6)
    if eps <= 0 or eps * eps >= -xi_value / zeta_value:
        eps = Fraction(1, 10 ** 6)
        while eps * eps >= -xi_value / zeta_value:
            eps /= 2
    return min(eps, cap)


def witness_uncommon(params, check_deficit=True):
    """Exact xi(f_n), zeta(f_n) and deficit(1/2 + eps f_n) = eps^2 xi + eps^4 zeta."""
    f = block_function(params)
    ints, D = f.integer_scaling()
    pair = params.pair
    total = count_solutions(form_of(pair), params.n)
    twice_quad, quartic = _split_sums(pair, ints)
    xi_value = Fraction(twice_quad, 2 * total * D * D)
    zeta_value = Fraction(2 * quartic, total * D ** 4)
    cap = Fraction(1, 2) / params.phi.sup_norm() if params.phi.sup_norm() else Fraction(1)
    eps = params.epsilon if params.epsilon is not None else _choose_epsilon(xi_value, zeta_value, cap)
    predicted = eps ** 2 * xi_value + eps ** 4 * zeta_value
    if check_deficit:
        direct = balanced_sum(pair, f.scaled(eps)) - Fraction(1, 8)
        if direct != predicted:
            raise AssertionError("deficit disagrees with eps^2 xi + eps^4 zeta")
    return WitnessReport(pair, params.n, xi_value, zeta_value, eps, predicted)


def scan_witness(pair, phi, n_max, n_step=None, check_deficit=True, stop_at_first=True):
    """Run :func:`witness_uncommon` over multiples of the aligned grid step up to n_max."""
    step = n_step or witness_grid_step(pair, phi)
    reports = []
    for n in range(step, n_max + 1, step):
        rep = witness_uncommon(WitnessParams(pair, phi, n), check_deficit=check_deficit)
        reports.append(rep)
        if stop_at_first and rep.deficit < 0:
            break
    return reports
