"""Colorings with few monochromatic solutions, Rado thresholds and dilation certificates.

Solutions are ordered tuples in [n]^k and may repeat values, so x + y = z counts
(1, 1, 2).  Random numbers come from numpy's PCG64 via ``default_rng(seed)``.
"""

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .linear import Coloring, LinearForm, integer_count


class BudgetExceeded(RuntimeError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class LinearSystem:
    """Integer matrix B (w x k) of full row rank; solutions are x in [n]^k with Bx = 0."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(c) for c in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("B must be a non-empty rectangular matrix")
        if _rank(rows) != len(rows):
            raise ValueError("B must have full row rank")

    @property
    def w(self):
        return len(self.rows)

    @property
    def k(self):
        return len(self.rows[0])

    @classmethod
    def of(cls, obj):
        if isinstance(obj, LinearSystem):
            return obj
        if isinstance(obj, LinearForm):
            return cls((obj.coeffs,))
        if isinstance(obj, str):
            return cls.parse(obj)
        obj = tuple(obj)
        if obj and isinstance(obj[0], (int, np.integer)):
            return cls((obj,))
        return cls(obj)

    @classmethod
    def parse(cls, text):
        """'1,1,-1' or '1,2,-3,0;0,1,1,-2' (rows separated by ';')."""
        return cls(tuple(tuple(int(t) for t in row.split(",")) for row in text.split(";")))

    def single_form(self):
        """The LinearForm when w = 1 and the sign condition holds, else None."""
        if self.w != 1:
            return None
        try:
            return LinearForm(self.rows[0])
        except ValueError:
            return None

    def __str__(self):
        return ";".join(",".join(str(c) for c in row) for row in self.rows)


def _rank(rows):
    M = [[Fraction(c) for c in row] for row in rows]
    rank, col = 0, 0
    ncols = len(M[0])
    while rank < len(M) and col < ncols:
        piv = next((i for i in range(rank, len(M)) if M[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][col] != 0:
                c = M[i][col] / M[rank][col]
                M[i] = [x - c * y for x, y in zip(M[i], M[rank])]
        rank += 1
        col += 1
    return rank


DEFAULT_SOLUTION_BUDGET = 20_000_000


def solutions(sys, n, budget=DEFAULT_SOLUTION_BUDGET):
    """All x in [n]^k with Bx = 0, enumerating the first k-1 coordinates (w = 1) or all k."""
    sys = LinearSystem.of(sys)
    k = sys.k
    if sys.w == 1:
        *head, last = sys.rows[0]
        if n ** (k - 1) > budget:
            raise BudgetExceeded(f"{n}^{k - 1} tuples exceed the enumeration budget {budget}")
        out = []
        if last == 0:
            for xs in itertools.product(range(1, n + 1), repeat=k - 1):
                if sum(c * x for c, x in zip(head, xs)) == 0:
                    out.extend(xs + (xk,) for xk in range(1, n + 1))
            return out
        for xs in itertools.product(range(1, n + 1), repeat=k - 1):
            s = sum(c * x for c, x in zip(head, xs))
            if s % last == 0:
                xk = -s // last
                if 1 <= xk <= n:
                    out.append(xs + (xk,))
        return out
    if n ** k > budget:
        raise BudgetExceeded(f"{n}^{k} tuples exceed the enumeration budget {budget}")
    return [xs for xs in itertools.product(range(1, n + 1), repeat=k)
            if all(sum(c * x for c, x in zip(row, xs)) == 0 for row in sys.rows)]


def mono_count_system(sys, c, sols=None):
    """Monochromatic solutions of Bx = 0 under the coloring c."""
    sys = LinearSystem.of(sys)
    form = sys.single_form()
    if form is not None and sols is None:
        return sum(integer_count(form, [int(col == j) for col in c.colors]) for j in range(c.r))
    sols = solutions(sys, c.n) if sols is None else sols
    cols = c.colors
    return sum(1 for s in sols if len({cols[x - 1] for x in s}) == 1)


# ---------------------------------------------------------------------------
# exhaustive minimum


DEFAULT_COLORING_BUDGET = 1 << 24


@dataclass
class BruteResult:
    min_count: int
    argmin: Coloring


def brute_min(sys, n, r=2, budget=DEFAULT_COLORING_BUDGET):
    """Exact minimum of the monochromatic count over all r-colorings of [n].

    Element 1 is pinned to color 0 (relabelling colors never changes the count),
    leaving r^(n-1) colorings.
    """
    sys = LinearSystem.of(sys)
    total = r ** (n - 1)
    if total > budget:
        raise BudgetExceeded(f"{r}^{n - 1} colorings exceed the budget {budget}")
    sols = solutions(sys, n)
    if n > 62:
        raise BudgetExceeded("bitmask enumeration supports n <= 62")
    if r == 2:
        masks = np.array([sum(1 << (x - 1) for x in set(s)) for s in sols], dtype=np.int64)
        best, best_c = None, None
        chunk = 1 << 16
        for start in range(0, total, chunk):
            # bit x-1 set means color 1; bit 0 (element 1) stays 0
            cs = (np.arange(start, min(total, start + chunk), dtype=np.int64) << 1)
            counts = np.zeros(len(cs), dtype=np.int64)
            for m in masks:
                hit = cs & m
                counts += (hit == 0) | (hit == m)
            i = int(np.argmin(counts))
            if best is None or counts[i] < best:
                best, best_c = int(counts[i]), int(cs[i])
        colors = tuple((best_c >> i) & 1 for i in range(n))
        return BruteResult(best, Coloring(colors, 2))
    best, best_cols = None, None
    sol_idx = [np.array([x - 1 for x in s]) for s in sols]
    chunk = 1 << 14
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        cols = np.zeros((len(codes), n), dtype=np.int64)
        rest = codes.copy()
        for pos in range(1, n):
            cols[:, pos] = rest % r
            rest //= r
        counts = np.zeros(len(codes), dtype=np.int64)
        for idx in sol_idx:
            sub = cols[:, idx]
            counts += (sub == sub[:, :1]).all(axis=1)
        i = int(np.argmin(counts))
        if best is None or counts[i] < best:
            best, best_cols = int(counts[i]), tuple(int(x) for x in cols[i])
    return BruteResult(best, Coloring(best_cols, r))


# ---------------------------------------------------------------------------
# local search


def _dilate(ind, a):
    """(array D, offset o) with D[a*x - o] = ind[x-1] for x in [n]."""
    n = len(ind)
    D = np.zeros(abs(a) * (n - 1) + 1, dtype=np.int64)
    x = np.arange(1, n + 1)
    o = a if a > 0 else a * n
    D[a * x - o] = ind
    return D, o


class _Gain3:
    """Per-element gains for a single 3-variable equation.

    gain(S)[z-1] is the number of solutions inside (S + {z})^3 that use z at least once,
    split by the set P of positions equal to z; the other positions range over S - {z}.
    """

    def __init__(self, coeffs, n):
        self.a = coeffs
        self.n = n
        self.z = np.arange(1, n + 1)
        a = coeffs
        self.full = int(sum(a) == 0)

    def _lookup(self, arr, off, t):
        idx = t - off
        ok = (idx >= 0) & (idx < len(arr))
        out = np.zeros(len(t), dtype=np.int64)
        out[ok] = arr[idx[ok]]
        return out

    def _single(self, ind, coef, t):
        # #{x in S : coef * x = t}
        ok = (t % coef == 0)
        x = np.where(ok, t // coef, 0)
        ok &= (x >= 1) & (x <= self.n)
        out = np.zeros(len(t), dtype=np.int64)
        out[ok] = ind[x[ok] - 1]
        return out, np.where(ok, x, 0)

    def gain(self, ind):
        a, z = self.a, self.z
        g = np.full(self.n, self.full, dtype=np.int64)
        dil = [_dilate(ind, c) for c in a]
        for i in range(3):
            j, l = [p for p in range(3) if p != i]
            # P = {i}: pairs (x_j, x_l) in (S - z)^2
            (Dj, oj), (Dl, ol) = dil[j], dil[l]
            R = np.convolve(Dj, Dl)
            g += self._lookup(R, oj + ol, -a[i] * z)
            sz = ind
            cnt_l, _ = self._single(ind, a[l], -(a[i] + a[j]) * z)
            cnt_j, _ = self._single(ind, a[j], -(a[i] + a[l]) * z)
            g -= sz * (cnt_l + cnt_j)
            g += sz * self.full
            # P = {j, l} fixed to z, x_i in S - z
            cnt, x = self._single(ind, a[i], -(a[j] + a[l]) * z)
            g += cnt * (x != z)
        return g


class _GainSolutions:
    """Gains from an explicit solution list, for systems and k != 3."""

    def __init__(self, sols, n):
        self.n = n
        self.sets = [tuple(sorted(set(s))) for s in sols]
        self.touching = [[] for _ in range(n + 1)]
        for idx, s in enumerate(self.sets):
            for x in s:
                self.touching[x].append(idx)

    def gain(self, ind):
        g = np.zeros(self.n, dtype=np.int64)
        for z in range(1, self.n + 1):
            cnt = 0
            for idx in self.touching[z]:
                if all(ind[x - 1] or x == z for x in self.sets[idx]):
                    cnt += 1
            g[z - 1] = cnt
        return g


def _gain_engine(sys, n):
    form = LinearSystem.of(sys).single_form()
    if form is not None and form.k == 3:
        return _Gain3(form.coeffs, n)
    return _GainSolutions(solutions(sys, n), n)


@dataclass
class SearchResult:
    best_count: int
    coloring: Coloring


def _climb(engine, colors, r, max_flips):
    n = len(colors)
    inds = [(colors == c).astype(np.int64) for c in range(r)]
    gains = [engine.gain(ind) for ind in inds]
    flips = 0
    z = 0
    since_improve = 0
    while since_improve < n and flips < max_flips:
        c = colors[z]
        for d in range(r):
            if d != c and gains[d][z] - gains[c][z] < 0:
                colors[z] = d
                inds[c][z] = 0
                inds[d][z] = 1
                gains[c] = engine.gain(inds[c])
                gains[d] = engine.gain(inds[d])
                flips += 1
                since_improve = -1
                break
        since_improve += 1
        z = (z + 1) % n
    return colors


def _restart(args):
    sys, n, r, seed, max_flips = args
    engine = _gain_engine(sys, n)
    rng = np.random.default_rng(seed)
    colors = rng.integers(0, r, size=n)
    colors = _climb(engine, colors, r, max_flips)
    col = Coloring(tuple(int(c) for c in colors), r)
    return mono_count_system(sys, col), col


def local_search(sys, n, r=2, restarts=8, seed=0, budget=None, workers=1):
    """Best coloring found by first-improvement single-element recoloring from seeded random starts.

    Restart i draws its start from ``default_rng([seed, i])``.  ``budget`` caps
    the number of flips per restart (default 50 n).
    """
    sys = LinearSystem.of(sys)
    max_flips = budget if budget is not None else 50 * n
    jobs = [(sys, n, r, [seed, i], max_flips) for i in range(restarts)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_restart, jobs))
    else:
        results = [_restart(j) for j in jobs]
    best = min(results, key=lambda t: t[0])
    return SearchResult(best[0], best[1])


def flip_delta(sys, coloring, z, new_color):
    """Exact change of the monochromatic count when z is recolored, via the gain engine."""
    engine = _gain_engine(sys, coloring.n)
    cols = np.array(coloring.colors)
    c = cols[z - 1]
    if c == new_color:
        return 0
    g_new = engine.gain((cols == new_color).astype(np.int64))[z - 1]
    g_old = engine.gain((cols == c).astype(np.int64))[z - 1]
    return int(g_new - g_old)


# ---------------------------------------------------------------------------
# Rado thresholds and the dilation certificate


@dataclass
class RadoCertificate:
    """Every r-coloring of [N0] has a monochromatic solution of ``system``."""

    system: LinearSystem
    N0: int
    r: int

    @property
    def epsilon(self):
        return Fraction(1, 2 * self.N0 * self.N0)


def _avoiding_coloring(by_max, N, r):
    """Backtracking search for an r-coloring of [N] with no monochromatic solution.

    ``by_max[x]`` lists solutions whose largest entry is x, so each one is checked
    as soon as its last element gets a color.  New colors are introduced in
    order, which removes the r! relabelling symmetry.
    """
    colors = [0] * (N + 1)

    def ok(x):
        cx = colors[x]
        return all(any(colors[y] != cx for y in s) for s in by_max[x])

    def extend(x, used):
        if x > N:
            return True
        for c in range(min(used + 1, r)):
            colors[x] = c
            if ok(x) and extend(x + 1, max(used, c + 1)):
                return True
        return False

    return colors[1:] if extend(1, 0) else None


def rado_threshold(sys, r=2, n_max=20, budget=DEFAULT_COLORING_BUDGET):
    """Least N0 <= n_max such that every r-coloring of [N0] has a monochromatic solution, else None."""
    sys = LinearSystem.of(sys)
    for N in range(1, n_max + 1):
        if r ** (N - 1) > budget:
            raise BudgetExceeded(f"{r}^{N - 1} colorings exceed the budget {budget}")
        by_max = [[] for _ in range(N + 1)]
        for s in solutions(sys, N):
            by_max[max(s)].append(tuple(set(s)))
        if _avoiding_coloring(by_max, N, r) is None:
            return RadoCertificate(sys, N, r)
    return None


@dataclass
class BlockSolution:
    dilation: int
    solution: tuple


def surviving_block_threshold(N0, n):
    """|A| must exceed n - floor(n / N0) / N0."""
    return n - Fraction(n // N0, N0)


def find_surviving_block(cert, c, A):
    """A monochromatic solution inside A taken from a dilate {d, 2d, ..., N0 d} contained in A."""
    n = c.n
    A = set(A)
    if not A <= set(range(1, n + 1)):
        raise PreconditionError("A must be a subset of [n]")
    if len(A) <= surviving_block_threshold(cert.N0, n):
        raise PreconditionError(
            f"|A| = {len(A)} does not exceed n - floor(n/N0)/N0 = {surviving_block_threshold(cert.N0, n)}")
    base = solutions(cert.system, cert.N0)
    for d in range(1, n // cert.N0 + 1):
        if all(d * i in A for i in range(1, cert.N0 + 1)):
            for s in base:
                xs = tuple(d * y for y in s)
                if len({c.color_of(x) for x in xs}) == 1:
                    return BlockSolution(d, xs)
            raise PreconditionError(f"coloring of dilate {d} has no monochromatic solution; "
                                    "certificate does not match this system or r")
    raise PreconditionError("no dilate lies inside A")


# ---------------------------------------------------------------------------
# growth of the minimum


@dataclass
class GrowthRow:
    n: int
    best_count: int
    method: str


@dataclass
class GrowthTable:
    rows: list
    slope: float = None

    def log2_ratios(self):
        out = []
        for p, q in zip(self.rows, self.rows[1:]):
            if p.best_count <= 0 or q.best_count <= 0:
                out.append(None)
            else:
                out.append(float(np.log2(q.best_count / p.best_count) / np.log2(q.n / p.n)))
        return out

    def to_csv(self):
        lines = ["n,best_count,method"]
        lines += [f"{row.n},{row.best_count},{row.method}" for row in self.rows]
        return "\n".join(lines) + "\n"


def growth_table(sys, n_list, r=2, restarts=4, seed=0, budget=None, brute_limit=1 << 16, workers=1):
    """Per-n minima (exhaustive when r^(n-1) <= brute_limit) and the fitted log-log slope.

    The slope is None when any count is zero.
    """
    sys = LinearSystem.of(sys)
    n_list = list(n_list)
    if any(p >= q for p, q in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be increasing")
    rows = []
    for n in n_list:
        if r ** (n - 1) <= brute_limit:
            rows.append(GrowthRow(n, brute_min(sys, n, r).min_count, "brute"))
        else:
            res = local_search(sys, n, r, restarts, seed, budget, workers)
            rows.append(GrowthRow(n, res.best_count, "local"))
    slope = None
    if len(rows) >= 2 and all(row.best_count > 0 for row in rows):
        slope = float(np.polyfit(np.log([row.n for row in rows]),
                                 np.log([row.best_count for row in rows]), 1)[0])
    return GrowthTable(rows, slope)
