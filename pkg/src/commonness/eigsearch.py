"""Numerical search for negative directions of H_{a,b}, rounded into exact certificates.

Floats only steer the search: every reported certificate value comes from
:func:`commonness.quadrature.integrate_quadratic`.
"""

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .kernel import H_array, SymmetricPair, _as_pair
from .quadrature import StepFunction, integrate_quadratic


class EigenNotConverged(RuntimeError):
    def __init__(self, msg, best):
        super().__init__(msg)
        self.best = best


class DegenerateRounding(ValueError):
    pass


@dataclass
class DiscretizedKernel:
    pair: SymmetricPair
    N: int
    matrix: np.ndarray


@dataclass
class EigenResult:
    lambda_min: float
    vector: np.ndarray
    residual: float


def discretize(pair, N):
    """M[i, j] = H((2i+1)/2N, (2j+1)/2N)."""
    if N < 8:
        raise ValueError("resolution N must be at least 8")
    pair = _as_pair(pair)
    x = (2 * np.arange(N) + 1) / (2 * N)
    M = H_array(pair, x[:, None], x[None, :])
    # H is symmetric term by term, but float rounding in a*u+b*v vs b*u+a*v is not
    M = (M + M.T) / 2
    return DiscretizedKernel(pair, N, M)


def _residual(M, lam, v):
    return float(np.linalg.norm(M @ v - lam * v))


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def alternating_start(n):
    """Alternating signs with a linear tilt.

    Plain (-1)^i is antisymmetric under i -> n-1-i for even n and so misses every
    eigenvector that is symmetric under that reflection, as H's are.
    """
    i = np.arange(n)
    return _unit((-1.0) ** i * (1.0 + i / n))


def _positive_definite(M):
    try:
        np.linalg.cholesky(M)
        return True
    except np.linalg.LinAlgError:
        return False


def shifted_power_iteration(M, tol=1e-9, max_iter=500, start=None):
    """Least eigenpair by power iteration on (M - s I)^{-1} with s just below the spectrum.

    s is located by bisection inside the Gershgorin interval: M - s I is positive
    definite (Cholesky succeeds) exactly when s lies below every eigenvalue.
    With s that close, each power step shrinks the unwanted components by
    (lambda_1 - s) / (lambda_2 - s), so a handful of iterations suffice.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    radius = np.sum(np.abs(M), axis=1) - np.abs(np.diag(M))
    lo = float(np.min(np.diag(M) - radius))
    hi = float(np.max(np.diag(M) + radius))
    scale = max(abs(lo), abs(hi), 1.0)
    eye = np.eye(n)
    while hi - lo > 1e-12 * scale:
        mid = (lo + hi) / 2
        if _positive_definite(M - mid * eye):
            lo = mid
        else:
            hi = mid
    shift = lo - 1e-10 * scale
    v = alternating_start(n) if start is None else _unit(start)
    lam = float(v @ M @ v)
    best = EigenResult(lam, v, _residual(M, lam, v))
    for _ in range(max_iter):
        v = _unit(np.linalg.solve(M - shift * eye, v))
        lam = float(v @ M @ v)
        res = _residual(M, lam, v)
        if res < best.residual:
            best = EigenResult(lam, v, res)
        if res <= tol:
            return best
    raise EigenNotConverged(f"no convergence after {max_iter} iterations", best)


def least_eigenpair(dk, tol=1e-9, method="dense"):
    """Smallest eigenvalue of the discretized kernel with a residual guarantee.

    ``method="dense"`` uses LAPACK's symmetric solver (with inverse-iteration
    polishing if the residual misses ``tol``); ``method="power"`` uses
    :func:`shifted_power_iteration`, which shares no code with the dense path.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = dk.matrix if isinstance(dk, DiscretizedKernel) else np.asarray(dk, dtype=float)
    if method == "power":
        res = shifted_power_iteration(M, tol)
        v = res.vector
        if v[np.argmax(np.abs(v))] < 0:
            res.vector = -v
        return res
    if method != "dense":
        raise ValueError(f"unknown method {method!r}")
    w, V = np.linalg.eigh(M)
    lam, v = float(w[0]), _unit(V[:, 0])
    res = _residual(M, lam, v)
    if res > tol:
        refined = _rayleigh_refine(M, lam, v, tol)
        if refined is None:
            raise EigenNotConverged(f"residual {res:.3g} above tol {tol:.3g}", EigenResult(lam, v, res))
        return refined
    # fix the sign so output does not depend on LAPACK internals
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return EigenResult(lam, v, res)


def round_to_step(v, N, levels=19, denom=200):
    """Round a grid vector to an integer-valued step function with breakpoints in (1/denom) Z.

    The vector is averaged (or, when denom does not divide N, sampled at the
    midpoints) onto denom equal cells, scaled so its largest magnitude is
    ``levels``, rounded, and equal neighbours are merged.
    """
    if levels < 1:
        raise ValueError("levels must be positive")
    v = np.asarray(v, dtype=float)
    if len(v) != N:
        raise ValueError("vector length must equal N")
    if N % denom == 0:
        cells = v.reshape(denom, N // denom).mean(axis=1)
    else:
        mids = ((2 * np.arange(denom) + 1) * N) // (2 * denom)
        cells = v[mids]
    peak = np.max(np.abs(cells))
    if peak == 0:
        raise DegenerateRounding("vector is identically zero")
    ints = np.rint(cells * (levels / peak)).astype(int)
    if not ints.any():
        raise DegenerateRounding("all values rounded to zero")
    bps = [Fraction(i, denom) for i in range(denom + 1)]
    return StepFunction(bps, [int(x) for x in ints]).merged()


@dataclass
class Certificate:
    pair: SymmetricPair
    phi: StepFunction
    value: Fraction

    @property
    def verdict(self):
        if self.value < 0:
            return "H not PSD => equation uncommon"
        return "inconclusive"

    @property
    def uncommon(self):
        return self.value < 0


def certify(pair, phi):
    pair = _as_pair(pair)
    return Certificate(pair, phi, integrate_quadratic(pair, phi))


def discover(pair, N=200, levels=19, denom=200, tol=1e-9, method="dense"):
    """Discretize, take the least eigenvector, round it and certify exactly."""
    dk = discretize(pair, N)
    eig = least_eigenpair(dk, tol, method)
    phi = round_to_step(eig.vector, N, levels, denom)
    return eig, certify(pair, phi)


def coprime_pairs(a_max, b_max):
    return [SymmetricPair(a, b) for b in range(2, b_max + 1)
            for a in range(1, min(a_max, b - 1) + 1) if gcd(a, b) == 1]


@dataclass
class ScanRow:
    pair: SymmetricPair
    N: int
    lambda_min: float = None
    certified: Fraction = None
    phi: StepFunction = None
    error: str = None

    def csv_fields(self):
        num = den = ""
        if self.certified is not None:
            num, den = self.certified.numerator, self.certified.denominator
        lam = "" if self.lambda_min is None else repr(self.lambda_min)
        return [self.pair.a, self.pair.b, self.N, lam, num, den]


def _scan_one(args):
    pair, N, tol, levels, denom = args
    row = ScanRow(pair, N)
    try:
        eig = least_eigenpair(discretize(pair, N), min(tol, 1e-9))
        row.lambda_min = eig.lambda_min
        if eig.lambda_min < -tol:
            cert = certify(pair, round_to_step(eig.vector, N, levels, denom))
            if cert.uncommon:
                row.certified, row.phi = cert.value, cert.phi
    except (EigenNotConverged, DegenerateRounding, ValueError) as exc:
        row.error = f"{type(exc).__name__}: {exc}"
    return row


def scan_pairs(a_max, b_max, N=200, tol=1e-9, levels=19, denom=None, workers=1):
    """Least discretized eigenvalue for every coprime a < b within the bounds, with certificates."""
    if a_max < 1 or b_max < 2:
        raise ValueError("need a_max >= 1 and b_max >= 2")
    denom = denom or N
    jobs = [(p, N, tol, levels, denom) for p in coprime_pairs(a_max, b_max)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_scan_one, jobs))
    return [_scan_one(j) for j in jobs]


def scan_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["a", "b", "N", "lambda_min", "certified_value_num", "certified_value_den"])
    for row in rows:
        w.writerow(row.csv_fields())
    return buf.getvalue()
