"""Small numerical helpers: log-Beta, falling factorials, compensated sums."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def log_beta(x: float, y: float) -> float:
    if x <= 0.0 or y <= 0.0:
        raise ValueError(f"Beta integral requires positive arguments, got ({x}, {y})")
    return math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y)


def beta_integral(x: float, y: float) -> float:
    """Euler Beta B(x, y) = integral of t^(x-1) (1-t)^(y-1) over (0, 1)."""
    return math.exp(log_beta(x, y))


def falling_factorial(m: int, k: int) -> float:
    """m (m-1) ... (m-k+1) as a float; 0 when k > m, 1 when k = 0."""
    if k < 0:
        raise ValueError("falling factorial order must be nonnegative")
    if k > m:
        return 0.0
    out = 1.0
    for i in range(k):
        out *= m - i
    return out


def int_factorial(k: int) -> float:
    """k! built by multiplication (k is small, order of a derivative)."""
    return falling_factorial(k, k)


class CompensatedSum:
    """Neumaier-compensated accumulator for complex series."""

    __slots__ = ("_re", "_im", "_cre", "_cim")

    def __init__(self):
        self._re = 0.0
        self._im = 0.0
        self._cre = 0.0
        self._cim = 0.0

    def add(self, value: complex) -> None:
        x = value.real
        t = self._re + x
        if abs(self._re) >= abs(x):
            self._cre += (self._re - t) + x
        else:
            self._cre += (x - t) + self._re
        self._re = t

        y = value.imag
        t = self._im + y
        if abs(self._im) >= abs(y):
            self._cim += (self._im - t) + y
        else:
            self._cim += (y - t) + self._im
        self._im = t

    @property
    def value(self) -> complex:
        return complex(self._re + self._cre, self._im + self._cim)


@lru_cache(maxsize=8)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on (-1, 1), cached."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w
