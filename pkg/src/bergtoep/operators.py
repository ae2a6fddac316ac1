"""Finite matrix truncations of Toeplitz operators with derivative symbols.

Matrix convention: ``entries[n][m]`` is the form applied to (e_m, e_n),
i.e. row n is the output index and column m the input index, so the array
is the matrix of the operator in the orthonormal monomial basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bergman import basis_deriv_coeff
from .measures import (
    CircleRadialDerivative,
    Combination,
    PointMass,
    SymbolSpec,
    is_radial,
    is_real_measure,
    moment,
    radial_moment,
)

__all__ = ["TruncatedOperator", "entry", "assemble", "adjoint_symbol"]

MAX_DIMENSION = 4096


@dataclass(frozen=True)
class TruncatedOperator:
    """N x N truncation of a Toeplitz operator, with symbol metadata.

    ``is_radial_band`` records the single-diagonal structure of rotation
    invariant symbols (entries vanish unless m - alpha = n - beta);
    ``is_hermitian`` holds when alpha = beta over a real measure.
    """

    dim: int
    entries: np.ndarray
    symbol: SymbolSpec
    assembly_tol: float = 0.0
    is_radial_band: bool = False
    is_hermitian: bool = False


def entry(symbol: SymbolSpec, n: int, m: int) -> complex:
    """Single matrix element: the form applied to (e_m, e_n).

    For measure bases this is
    (-1)^(alpha+beta) c(m, alpha) c(n, beta) M(m - alpha, n - beta)
    with c the basis derivative coefficient and M the monomial moment.
    The circle radial-derivative pairing has the closed form
    -delta(n, m) (n+1) 2n r0^(2n-1).
    """
    if n < 0 or m < 0:
        raise ValueError("matrix indices must be nonnegative")
    alpha, beta = symbol.alpha, symbol.beta
    base = symbol.base
    if isinstance(base, CircleRadialDerivative):
        # alpha = beta = 0 is enforced by SymbolSpec
        if n != m:
            return 0.0 + 0.0j
        return complex(-(n + 1.0) * 2.0 * n * base.r0 ** max(2 * n - 1, 0))
    if isinstance(base, Combination):
        return sum(
            (c * entry(SymbolSpec(alpha, beta, b), n, m) for c, b in base.terms),
            0.0 + 0.0j,
        )
    if m < alpha or n < beta:
        return 0.0 + 0.0j
    sign = -1.0 if (alpha + beta) % 2 else 1.0
    return (
        sign
        * basis_deriv_coeff(m, alpha)
        * basis_deriv_coeff(n, beta)
        * moment(base, m - alpha, n - beta)
    )


def _assemble_array(symbol: SymbolSpec, dim: int) -> np.ndarray:
    alpha, beta = symbol.alpha, symbol.beta
    base = symbol.base
    sign = -1.0 if (alpha + beta) % 2 else 1.0

    if isinstance(base, Combination):
        out = np.zeros((dim, dim), dtype=complex)
        for c, b in base.terms:
            out += c * _assemble_array(SymbolSpec(alpha, beta, b), dim)
        return out

    if isinstance(base, CircleRadialDerivative):
        n = np.arange(dim)
        diag = -(n + 1.0) * 2.0 * n * base.r0 ** np.maximum(2 * n - 1, 0)
        return np.diag(diag).astype(complex)

    if isinstance(base, PointMass):
        if alpha > beta:
            # canonical orientation; the other is its exact conjugate
            # transpose, which keeps adjoint coherence bitwise
            swapped = _assemble_array(SymbolSpec(beta, alpha, base), dim)
            return np.ascontiguousarray(swapped.conj().T)
        m = np.arange(dim)
        cm = np.array([basis_deriv_coeff(int(i), alpha) for i in m])
        cn = np.array([basis_deriv_coeff(int(i), beta) for i in m])
        zpow_m = np.array(
            [base.z0 ** (i - alpha) if i >= alpha else 0.0 for i in m], dtype=complex
        )
        zpow_n = np.array(
            [base.z0 ** (i - beta) if i >= beta else 0.0 for i in m], dtype=complex
        )
        col = cm * zpow_m          # input-side vector, index m
        row = cn * zpow_n          # output-side vector, index n
        # entries[n, m] = sign * col[m] * conj(row[n]): a rank-one matrix
        out = sign * np.outer(row.conjugate(), col)
        if alpha == beta:
            # the adjoint is the same symbol, so the matrix must be
            # Hermitian to the bit: mirror the upper triangle and keep
            # the diagonal real (fused multiplies otherwise leave ulps)
            upper = np.triu_indices(dim, 1)
            out[(upper[1], upper[0])] = out[upper].conj()
            diag = np.diag_indices(dim)
            out[diag] = out[diag].real
        return out

    # radial measures: one diagonal band m - alpha = n - beta
    out = np.zeros((dim, dim), dtype=complex)
    for n in range(dim):
        m = n - beta + alpha
        if m < alpha or m >= dim or n < beta:
            continue
        out[n, m] = (
            sign
            * basis_deriv_coeff(m, alpha)
            * basis_deriv_coeff(n, beta)
            * radial_moment(base, m - alpha)
        )
    return out


def assemble(symbol: SymbolSpec, dim: int) -> TruncatedOperator:
    """Dense truncation of the operator, entries[n][m] for 0 <= n, m < dim."""
    if dim < 1:
        raise ValueError("truncation dimension must be positive")
    if dim > MAX_DIMENSION:
        raise ValueError(f"truncation dimension capped at {MAX_DIMENSION}")
    entries = _assemble_array(symbol, dim)
    return TruncatedOperator(
        dim=dim,
        entries=entries,
        symbol=symbol,
        assembly_tol=0.0,
        is_radial_band=is_radial(symbol.base),
        is_hermitian=(symbol.alpha == symbol.beta) and is_real_measure(symbol.base),
    )


def adjoint_symbol(symbol: SymbolSpec) -> SymbolSpec:
    """Symbol of the adjoint operator: swap orders, conjugate coefficients."""
    base = symbol.base
    if isinstance(base, Combination):
        base = Combination(tuple((c.conjugate(), b) for c, b in base.terms))
    return SymbolSpec(alpha=symbol.beta, beta=symbol.alpha, base=base)
