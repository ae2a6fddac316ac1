"""Measures and distributions on the unit disk, their monomial moments,
and the boundary-weight integral that gates trace-class membership.

The area measure is normalized as dA = (1/pi) dx dy, so integrals of
radial profiles reduce to integrals over t = |z|^2 on (0, 1).  Every
moment here is exact (closed form), not quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import UnsupportedSymbolError
from .numutil import beta_integral

__all__ = [
    "RadialPower",
    "PointMass",
    "CircleUniform",
    "CircleRadialDerivative",
    "Combination",
    "BaseMeasure",
    "SymbolSpec",
    "FinitenessReport",
    "moment",
    "radial_moment",
    "carleson_integral",
    "boundary_weight_integral",
    "is_radial",
    "is_nonnegative",
    "is_real_measure",
    "contains_distribution",
]

MAX_DERIVATIVE_ORDER = 32


@dataclass(frozen=True)
class RadialPower:
    """dmu = (1 - |z|^2)^s |z|^(2a) dA; needs s > -1 and a > -1."""

    s: float
    a: float = 0.0

    def __post_init__(self):
        if not (self.s > -1.0):
            raise ValueError(f"radial power weight needs s > -1, got s={self.s}")
        if not (self.a > -1.0):
            raise ValueError(f"radial power weight needs a > -1, got a={self.a}")


@dataclass(frozen=True)
class PointMass:
    """Unit mass at a point z0 strictly inside the disk."""

    z0: complex

    def __post_init__(self):
        object.__setattr__(self, "z0", complex(self.z0))
        if not abs(self.z0) < 1.0:
            raise ValueError(f"point mass must sit inside the disk, got |z0|={abs(self.z0)}")


@dataclass(frozen=True)
class CircleUniform:
    """Uniform probability measure on the circle |z| = r0."""

    r0: float

    def __post_init__(self):
        if not (0.0 < self.r0 < 1.0):
            raise ValueError(f"circle radius must lie in (0, 1), got r0={self.r0}")


@dataclass(frozen=True)
class CircleRadialDerivative:
    """Radial derivative of the uniform circle measure at radius r0.

    A distribution, not a measure: it pairs with a test function phi as
    minus the radial derivative of phi's angular average at r0.
    """

    r0: float

    def __post_init__(self):
        if not (0.0 < self.r0 < 1.0):
            raise ValueError(f"circle radius must lie in (0, 1), got r0={self.r0}")


_ATOM_KINDS = (RadialPower, PointMass, CircleUniform, CircleRadialDerivative)


@dataclass(frozen=True)
class Combination:
    """Finite complex combination of the four atomic kinds (flat, nonempty)."""

    terms: tuple

    def __post_init__(self):
        normalized = []
        for item in self.terms:
            try:
                coeff, base = item
            except (TypeError, ValueError):
                raise ValueError("combination terms must be (coefficient, measure) pairs")
            if not isinstance(base, _ATOM_KINDS):
                raise ValueError(f"combination terms must be atomic measures, got {type(base).__name__}")
            normalized.append((complex(coeff), base))
        if not normalized:
            raise ValueError("combination must have at least one term")
        object.__setattr__(self, "terms", tuple(normalized))


BaseMeasure = Union[RadialPower, PointMass, CircleUniform, CircleRadialDerivative, Combination]


def contains_distribution(base: BaseMeasure) -> bool:
    if isinstance(base, CircleRadialDerivative):
        return True
    if isinstance(base, Combination):
        return any(isinstance(b, CircleRadialDerivative) for _, b in base.terms)
    return False


def is_radial(base: BaseMeasure) -> bool:
    """True when the measure is rotation invariant (point masses are not)."""
    if isinstance(base, (RadialPower, CircleUniform, CircleRadialDerivative)):
        return True
    if isinstance(base, Combination):
        return all(is_radial(b) for _, b in base.terms)
    return False


def is_nonnegative(base: BaseMeasure) -> bool:
    if isinstance(base, (RadialPower, PointMass, CircleUniform)):
        return True
    if isinstance(base, Combination):
        return all(
            c.imag == 0.0 and c.real >= 0.0 and is_nonnegative(b) for c, b in base.terms
        )
    return False


def is_real_measure(base: BaseMeasure) -> bool:
    """True when the pairing is real-valued (real coefficients throughout)."""
    if isinstance(base, Combination):
        return all(c.imag == 0.0 for c, _ in base.terms)
    return True


@dataclass(frozen=True)
class SymbolSpec:
    """Derivative orders (alpha, beta) applied to a base measure.

    Represents the sesquilinear form pairing the alpha-th derivative of
    the first argument against the beta-th derivative of the second, with
    sign (-1)^(alpha+beta), integrated against the base measure.
    """

    alpha: int
    beta: int
    base: BaseMeasure

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("derivative orders must be nonnegative")
        if int(self.alpha) != self.alpha or int(self.beta) != self.beta:
            raise ValueError("derivative orders must be integers")
        if self.alpha + self.beta > MAX_DERIVATIVE_ORDER:
            raise ValueError(
                f"alpha + beta capped at {MAX_DERIVATIVE_ORDER} (factorial growth), "
                f"got {self.alpha + self.beta}"
            )
        if contains_distribution(self.base) and (self.alpha != 0 or self.beta != 0):
            raise ValueError(
                "circle radial-derivative symbols support alpha = beta = 0 only"
            )


@dataclass(frozen=True)
class FinitenessReport:
    """Outcome of a boundary-weight integral: its value or why it diverges."""

    k: int
    finite: bool
    value: float | None = None
    divergence_exponent: float | None = None

    def __post_init__(self):
        if self.finite and (self.value is None or self.divergence_exponent is not None):
            raise ValueError("finite report carries a value and no exponent")
        if not self.finite and (self.value is not None or self.divergence_exponent is None):
            raise ValueError("divergent report carries an exponent and no value")


def radial_moment(base: BaseMeasure, p: int) -> float:
    """Diagonal moment of a radial measure: integral of |w|^(2p) dmu."""
    if isinstance(base, RadialPower):
        return beta_integral(p + base.a + 1.0, base.s + 1.0)
    if isinstance(base, CircleUniform):
        return base.r0 ** (2 * p)
    raise UnsupportedSymbolError(
        f"no radial moment for {type(base).__name__}"
    )


def moment(base: BaseMeasure, p: int, q: int) -> complex:
    """Monomial moment: integral of w^p conj(w)^q dmu(w), exact per variant.

    Radial variants vanish off the diagonal p = q by angular orthogonality,
    and the zero is exact, not a rounded small number.
    """
    if p < 0 or q < 0:
        raise ValueError(f"moment indices must be nonnegative, got ({p}, {q})")
    if isinstance(base, RadialPower) or isinstance(base, CircleUniform):
        if p != q:
            return 0.0 + 0.0j
        return complex(radial_moment(base, p))
    if isinstance(base, PointMass):
        return base.z0**p * base.z0.conjugate() ** q
    if isinstance(base, Combination):
        return sum((c * moment(b, p, q) for c, b in base.terms), 0.0 + 0.0j)
    raise UnsupportedSymbolError(
        "distributions have no monomial moments; use the dedicated pairings"
    )


def boundary_weight_integral(base: BaseMeasure, weight_order: int) -> FinitenessReport:
    """Integral of (1 - |w|^2)^(-weight_order) against |mu|, decided analytically.

    ``weight_order`` is the full exponent (2k + 2 for Carleson order k).
    For combinations the total-variation mass is bounded term-wise, an
    upper bound; any divergent term with a nonzero coefficient makes the
    whole report divergent (conservative rule).
    """
    k_report = max((weight_order - 2) // 2, 0)
    if isinstance(base, RadialPower):
        exponent = base.s - weight_order
        if exponent > -1.0:
            return FinitenessReport(
                k=k_report, finite=True, value=beta_integral(base.a + 1.0, exponent + 1.0)
            )
        return FinitenessReport(k=k_report, finite=False, divergence_exponent=exponent)
    if isinstance(base, PointMass):
        return FinitenessReport(
            k=k_report, finite=True, value=(1.0 - abs(base.z0) ** 2) ** (-weight_order)
        )
    if isinstance(base, CircleUniform):
        return FinitenessReport(
            k=k_report, finite=True, value=(1.0 - base.r0**2) ** (-weight_order)
        )
    if isinstance(base, Combination):
        total = 0.0
        worst = None
        for c, b in base.terms:
            if c == 0:
                continue
            sub = boundary_weight_integral(b, weight_order)
            if not sub.finite:
                worst = sub.divergence_exponent if worst is None else min(worst, sub.divergence_exponent)
            else:
                total += abs(c) * sub.value
        if worst is not None:
            return FinitenessReport(k=k_report, finite=False, divergence_exponent=worst)
        return FinitenessReport(k=k_report, finite=True, value=total)
    raise UnsupportedSymbolError(
        "finiteness integral is defined for measures, not distributions"
    )


def carleson_integral(base: BaseMeasure, k: int) -> FinitenessReport:
    """Boundary integral of (1 - |w|^2)^(-2k-2) d|mu|, with closed-form value.

    Finite for every compactly supported variant; for a radial power weight,
    finite exactly when s - 2k - 2 > -1.
    """
    if k < 0:
        raise ValueError(f"Carleson order must be nonnegative, got {k}")
    if contains_distribution(base):
        raise UnsupportedSymbolError(
            "finiteness integral is defined for measures, not distributions"
        )
    report = boundary_weight_integral(base, 2 * k + 2)
    return FinitenessReport(
        k=k,
        finite=report.finite,
        value=report.value,
        divergence_exponent=report.divergence_exponent,
    )
