"""Closed forms tied to the Bergman space of the unit disk.

Orthonormal basis e_n(z) = sqrt(n+1) z^n under normalized area measure,
reproducing kernel K_z(w) = (1 - conj(z) w)^(-2), and the two-sided
derivative kernel

    D(a, b)(w) = d^a dbar^b (1 - w conj(w))^(-2)
              = sum over j >= max(a, b) of
                (j+1) [j!/(j-a)!] [j!/(j-b)!] w^(j-a) conj(w)^(j-b),

which the trace formula pairs against the base measure.  Series are summed
with compensated accumulation and a term-ratio geometric tail bound; all
factorial-like coefficients are carried by multiplicative recurrences.
"""

from __future__ import annotations

import math

from .errors import BoundaryError, NumericalFailureError
from .numutil import CompensatedSum, falling_factorial, int_factorial

__all__ = [
    "basis_deriv_coeff",
    "kernel_deriv_eval",
    "kernel_deriv_norm",
    "d_alpha_beta_eval",
    "d_alpha_beta_terms",
    "d_alpha_beta_closed",
]

BOUNDARY_MARGIN = 1e-6
SERIES_TERM_CAP = 100_000


def basis_deriv_coeff(m: int, alpha: int) -> float:
    """Coefficient of z^(m-alpha) in the alpha-th derivative of e_m.

    Equals sqrt(m+1) * m!/(m-alpha)!, and 0 when the derivative order
    exceeds the degree.
    """
    if m < 0 or alpha < 0:
        raise ValueError("basis index and derivative order must be nonnegative")
    if alpha > m:
        return 0.0
    return math.sqrt(m + 1.0) * falling_factorial(m, alpha)


def kernel_deriv_eval(z: complex, w: complex, alpha: int) -> complex:
    """alpha-th derivative in w of the reproducing kernel K_z at w.

    Closed form (alpha+1)! conj(z)^alpha (1 - conj(z) w)^(-(2+alpha)).
    """
    z = complex(z)
    w = complex(w)
    if alpha < 0:
        raise ValueError("derivative order must be nonnegative")
    if not (abs(z) < 1.0 and abs(w) < 1.0):
        raise BoundaryError("kernel derivative is evaluated at interior points only")
    denom = 1.0 - z.conjugate() * w
    if abs(denom) < 1e-15:
        raise BoundaryError("kernel evaluation too close to the diagonal singularity")
    return int_factorial(alpha + 1) * z.conjugate() ** alpha * denom ** (-(2 + alpha))


def kernel_deriv_norm(z0: complex, gamma: int, tol: float = 1e-12) -> float:
    """Norm of the gamma-th kernel derivative v(w) = (gamma+1)! w^gamma
    (1 - conj(z0) w)^(-(2+gamma)), the function reproducing f^(gamma)(z0).

    Squared norm: ((gamma+1)!)^2 sum_p binom(p+gamma+1, p)^2 |z0|^(2p) / (p+gamma+1).
    """
    z0 = complex(z0)
    if gamma < 0:
        raise ValueError("derivative order must be nonnegative")
    x = (z0 * z0.conjugate()).real
    if x >= 1.0:
        raise BoundaryError("kernel derivative norm needs |z0| < 1")
    acc = CompensatedSum()
    term = 1.0 / (gamma + 1.0)
    p = 0
    while p < SERIES_TERM_CAP:
        acc.add(term)
        ratio = (p + gamma + 2.0) * (p + gamma + 1.0) / ((p + 1.0) * (p + 1.0)) * x
        if ratio < 1.0 and term * ratio / (1.0 - ratio) <= tol:
            break
        term *= ratio
        p += 1
    else:
        raise NumericalFailureError(
            f"kernel norm series did not converge within {SERIES_TERM_CAP} terms"
        )
    return int_factorial(gamma + 1) * math.sqrt(acc.value.real)


def d_alpha_beta_eval(w: complex, alpha: int, beta: int, tol: float = 1e-10) -> complex:
    """Derivative kernel D(alpha, beta)(w) by its power series.

    Stops once the geometric tail bound (current term times ratio/(1-ratio))
    drops below tol; the term ratio tends to |w|^2 from above.
    """
    w = complex(w)
    if alpha < 0 or beta < 0:
        raise ValueError("derivative orders must be nonnegative")
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if abs(w) > 1.0 - BOUNDARY_MARGIN:
        raise BoundaryError(
            f"derivative kernel series needs |w| <= {1.0 - BOUNDARY_MARGIN}, got |w|={abs(w)}"
        )
    t = (w * w.conjugate()).real
    j0 = max(alpha, beta)
    term = (
        (j0 + 1.0)
        * falling_factorial(j0, alpha)
        * falling_factorial(j0, beta)
        * w ** (j0 - alpha)
        * w.conjugate() ** (j0 - beta)
    )
    acc = CompensatedSum()
    j = j0
    while j < j0 + SERIES_TERM_CAP:
        acc.add(term)
        ratio = (
            (j + 2.0)
            / (j + 1.0)
            * ((j + 1.0) / (j + 1.0 - alpha))
            * ((j + 1.0) / (j + 1.0 - beta))
            * t
        )
        if ratio < 1.0 and abs(term) * ratio / (1.0 - ratio) <= tol:
            return acc.value
        term *= ratio
        j += 1
    raise NumericalFailureError(
        f"derivative kernel series did not converge within {SERIES_TERM_CAP} terms at |w|={abs(w)}",
        partial=acc.value,
    )


def d_alpha_beta_terms(alpha: int, beta: int) -> list[tuple[float, int, int, int]]:
    """Finite expansion of D(alpha, beta) via the product rule.

    Returns tuples (coef, p_conj, p, m) meaning
    coef * conj(w)^p_conj * w^p * (1 - |w|^2)^(-m), with
    p_conj = alpha - i, p = beta - i, m = 2 + alpha + beta - i for
    i = 0 .. min(alpha, beta).  Differentiating first in w gives
    (alpha+1)! conj(w)^alpha (1 - |w|^2)^(-(2+alpha)); the conjugate
    derivatives then distribute over that product.
    """
    if alpha < 0 or beta < 0:
        raise ValueError("derivative orders must be nonnegative")
    lead = int_factorial(alpha + 1)
    terms = []
    for i in range(min(alpha, beta) + 1):
        # binom(beta, i) * alpha!/(alpha-i)! * (1+alpha+beta-i)!/(1+alpha)!
        coef = (
            lead
            * falling_factorial(beta, i)
            / int_factorial(i)
            * falling_factorial(alpha, i)
            * falling_factorial(1 + alpha + beta - i, beta - i)
        )
        terms.append((coef, alpha - i, beta - i, 2 + alpha + beta - i))
    return terms


def d_alpha_beta_closed(w: complex, alpha: int, beta: int) -> complex:
    """Derivative kernel via the finite product-rule expansion (exact)."""
    w = complex(w)
    u = 1.0 - (w * w.conjugate()).real
    if u <= 0.0:
        raise BoundaryError("derivative kernel is defined inside the disk")
    total = 0.0 + 0.0j
    for coef, p_conj, p, m in d_alpha_beta_terms(alpha, beta):
        total += coef * w.conjugate() ** p_conj * w**p * u ** (-m)
    return total
