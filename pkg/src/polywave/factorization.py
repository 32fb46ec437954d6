"""Spectral factorisation of subdivision symbols into orthogonal refinement masks.

The mask is ``g = M1 * M2`` where ``M1 = ((z + x0)/(1 + x0))**N`` is the
explicit square root of ``d`` and ``M2`` is a Riesz factor of the Bezout
polynomial with ``|M2(e^{iw})|^2 = 4 Q(sin^2(w/2))``, so that
``a(e^{iw}) = |g(e^{iw})|^2 / 2``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NegativeOnCircle
from .laurent import (
    ComplexRootSet,
    LaurentPolynomial,
    RealPolynomial,
    cos_substitute,
    eval_circle,
    roots,
)
from .symbols import SymbolContext, a_symbol, bezout_solve, q_polynomial_closed_form, q_zeros

TOL_FACTORIZATION = 1e-9
TOL_QMF = 1e-9


def m1_factor(ctx: SymbolContext) -> LaurentPolynomial:
    x0 = ctx.x0
    return LaurentPolynomial(0, np.array([x0, 1.0]) / (1.0 + x0)) ** ctx.N


def _small_root(c: complex) -> complex:
    # root of r + 1/r = 2c with |r| <= 1; avoids forming c*c
    s = cmath.sqrt(c - 1) * cmath.sqrt(c + 1)
    big = c + s if abs(c + s) >= abs(c - s) else c - s
    return 1.0 / big


def riesz_factor(Qtilde: RealPolynomial, scale_target: float,
                 zeros: Optional[ComplexRootSet] = None,
                 grid_size: int = 512) -> LaurentPolynomial:
    """Real ``q`` of degree ``deg Qtilde`` with ``|q(e^{iw})|^2 = scale_target * Qtilde(cos w)``.

    From each reciprocal pair ``r, 1/r`` solving ``(r + 1/r)/2 = c_j`` the
    root inside the disk is taken and contributes the factor ``(1 - r z)``.
    Unimodular pairs (double zeros of ``Qtilde`` in ``(-1, 1)``) are split
    evenly between ``q`` and its reflection.  ``q(1) > 0``.
    """
    if scale_target <= 0:
        raise ValueError("scale_target must be positive")
    omega = np.linspace(0.0, np.pi, grid_size)
    vals = Qtilde(np.cos(omega))
    if np.min(vals) < -1e-10 * max(1.0, float(np.max(np.abs(vals)))):
        raise NegativeOnCircle(f"Qtilde(cos w) reaches {np.min(vals):.3e} < 0")
    if Qtilde.degree == 0:
        return LaurentPolynomial.constant(np.sqrt(scale_target * Qtilde.coeffs[0]))
    if zeros is None:
        zeros = roots(Qtilde)
    if zeros.degree != Qtilde.degree:
        raise ValueError("zero set does not match the degree of Qtilde")

    picked: list[complex] = []
    for c, mult in zip(zeros.roots, zeros.multiplicities):
        if c.imag < 0:
            r = _small_root(c.conjugate()).conjugate()
        else:
            r = _small_root(c)
        if abs(abs(r) - 1.0) > 1e-7 or abs(r.imag) <= 1e-7:
            picked.extend([r] * mult)
        else:
            if mult % 2:
                raise NegativeOnCircle(f"zero {c} of odd multiplicity inside (-1, 1)")
            picked.extend([r] * (mult // 2) + [r.conjugate()] * (mult // 2))

    base = np.ones(1, dtype=complex)
    for r in picked:
        base = np.convolve(base, [1.0, -r])
    if np.max(np.abs(base.imag)) > 1e-10 * np.max(np.abs(base)):
        raise ValueError("Riesz factor has complex coefficients; zeros are not conjugate-paired")
    base = LaurentPolynomial(0, base.real)

    k = int(np.argmax(vals))
    mod2 = abs(eval_circle(base, omega[k])) ** 2
    K = np.sqrt(scale_target * vals[k] / mod2)
    return base * K


@dataclass(frozen=True, eq=False)
class RefinementMask:
    context: SymbolContext
    g: LaurentPolynomial

    @property
    def N(self) -> int:
        return self.context.N

    @property
    def coeffs(self) -> np.ndarray:
        return self.g.window(0, 2 * self.N - 1)

    @property
    def highpass(self) -> LaurentPolynomial:
        return highpass(self.g)

    def qmf_residual(self) -> float:
        return qmf_residual(self.coeffs)

    def factorization_residual(self, grid_size: int = 512) -> float:
        return factorization_residual(self.g, a_symbol(self.context).a, grid_size)

    def to_dict(self, grid_size: int = 512) -> dict:
        return {
            "kind": "mask",
            "N": self.N,
            "xi": self.context.xi,
            "level": self.context.level,
            "lo": 0,
            "coeffs": [float(c) for c in self.coeffs],
            "qmf_residual": self.qmf_residual(),
            "factorization_residual": self.factorization_residual(grid_size),
        }


def highpass(g: LaurentPolynomial) -> LaurentPolynomial:
    """Alternating flip ``h_j = (-1)^j g_{1-j}``."""
    lo = 1 - g.hi
    js = np.arange(lo, lo + len(g.coeffs))
    return LaurentPolynomial(lo, np.where(js % 2, -1.0, 1.0) * g.coeffs[::-1])


def qmf_residual(g: np.ndarray) -> float:
    """``max_l |sum_j g_j g_{j+2l} - 2 delta_l|``."""
    g = np.asarray(g, dtype=float)
    ac = np.correlate(g, g, mode="full")
    n = len(g) - 1
    lags = np.arange(-n, n + 1)
    even = ac[lags % 2 == 0]
    target = (lags[lags % 2 == 0] == 0) * 2.0
    return float(np.max(np.abs(even - target)))


def factorization_residual(g: LaurentPolynomial, a: LaurentPolynomial, grid_size: int = 512) -> float:
    omega = 2 * np.pi * np.arange(grid_size) / grid_size
    lhs = 0.5 * np.abs(eval_circle(g, omega)) ** 2
    return float(np.max(np.abs(lhs - np.real(eval_circle(a, omega)))))


def m2_factor(ctx: SymbolContext) -> LaurentPolynomial:
    # zeros C of Q map to zeros c = 1 - 2C of Qtilde
    Qt = cos_substitute(q_polynomial_closed_form(ctx))
    zeros = q_zeros(ctx).map(lambda C: 1.0 - 2.0 * C)
    return riesz_factor(Qt, 4.0, zeros=zeros)


def refinement_mask(ctx: SymbolContext) -> RefinementMask:
    g = m1_factor(ctx) * m2_factor(ctx)
    return RefinementMask(ctx, g)


def mask_family(N: int, xi: float, levels: int, base_level: int = 0) -> list[RefinementMask]:
    if levels < 1:
        raise ValueError("levels must be >= 1")
    return [refinement_mask(SymbolContext(N, xi, m)) for m in range(base_level, base_level + levels)]


def classical_mask(N: int) -> LaurentPolynomial:
    """Classical Daubechies mask (sum 2) from ``P = (1 - x)^N`` via the numeric
    Bezout solve and a direct root search of ``Qtilde``."""
    Q = bezout_solve(RealPolynomial([1.0, -1.0]) ** N)
    M2 = riesz_factor(cos_substitute(Q), 4.0)
    return LaurentPolynomial(0, np.array([0.5, 0.5])) ** N * M2
