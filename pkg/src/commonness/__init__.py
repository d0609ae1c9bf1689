"""Exact counting and (un)commonness certificates for linear equations over {1, ..., n}."""

from .kernel import SymmetricPair, H, alpha, beta
from .linear import (Coloring, LinearForm, WeightFn, count_solutions, count_via_convolution,
                     deficit, weighted_count)
from .quadrature import StepFunction, integrate_quadratic, certificate_phi

__version__ = "0.1.0"
