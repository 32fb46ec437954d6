"""Non-stationary interpolatory subdivision and cascade tabulation.

Grid functions live on the unit scale: ``Phi_m(j) = delta_j`` on the integers
and the tabulation grid after ``L`` refinements has spacing ``2**-L``.  The
level index ``m`` only selects which masks ``a^[m], a^[m+1], ...`` (or
``g^[m], ...``) the cascade applies.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import LevelMismatch, PowerExceedsMultiplicity
from .factorization import RefinementMask, highpass, refinement_mask
from .laurent import LaurentPolynomial
from .symbols import FrequencyVector, SubdivisionSymbol, SymbolContext, a_symbol, symbol_for


@dataclass(frozen=True, eq=False)
class SampleSequence:
    """Values ``f((lo + i) / 2**level)``."""

    level: int
    lo: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    @property
    def hi(self) -> int:
        return self.lo + len(self.values) - 1

    def window(self, lo: int, hi: int) -> np.ndarray:
        return self.values[lo - self.lo:hi - self.lo + 1]


@dataclass(frozen=True, eq=False)
class DyadicGridFunction:
    """Samples at ``t = (lo + i) / 2**resolution`` of a compactly supported function."""

    base_level: int
    resolution: int
    lo: int
    values: np.ndarray

    @property
    def step(self) -> float:
        return 2.0 ** -self.resolution

    @property
    def t(self) -> np.ndarray:
        return (self.lo + np.arange(len(self.values))) * self.step

    @property
    def support(self) -> tuple[float, float]:
        nz = np.flatnonzero(self.values)
        if nz.size == 0:
            return (0.0, 0.0)
        return ((self.lo + nz[0]) * self.step, (self.lo + nz[-1]) * self.step)

    def at_index(self, n) -> np.ndarray:
        n = np.asarray(n) - self.lo
        ok = (n >= 0) & (n < len(self.values))
        return np.where(ok, self.values[np.clip(n, 0, len(self.values) - 1)], 0.0)

    def integer_samples(self, lo: int, hi: int) -> np.ndarray:
        scale = 2 ** self.resolution
        return self.at_index(np.arange(lo, hi + 1) * scale)

    def riemann_sum(self) -> float:
        return float(np.sum(self.values) * self.step)

    def inner(self, other: DyadicGridFunction, shift: int = 0) -> float:
        """Riemann sum of ``self(t) * other(t - shift)`` for an integer shift."""
        if other.resolution != self.resolution:
            raise ValueError("grid resolutions differ")
        off = other.lo + shift * 2 ** self.resolution
        lo = max(self.lo, off)
        hi = min(self.lo + len(self.values), off + len(other.values))
        if hi <= lo:
            return 0.0
        a = self.values[lo - self.lo:hi - self.lo]
        b = other.values[lo - off:hi - off]
        return float(np.dot(a, b) * self.step)

    def max_second_difference(self) -> float:
        if len(self.values) < 3:
            return 0.0
        return float(np.max(np.abs(np.diff(self.values, 2))))


def _upsample(c: np.ndarray, factor: int) -> np.ndarray:
    if factor == 1:
        return c
    out = np.zeros((len(c) - 1) * factor + 1, dtype=c.dtype)
    out[::factor] = c
    return out


def subdivide_once(s: SampleSequence, symbol: SubdivisionSymbol, exact_even: bool = True) -> SampleSequence:
    """One step ``f^{k+1}_{j'} = sum_j a_{j'-2j} f^k_j``.

    With ``exact_even`` the even slots are copied from the input (the symbol
    is interpolatory) and only the odd coefficients of ``a`` are used.
    """
    if symbol.level != s.level:
        raise LevelMismatch(f"symbol level {symbol.level} != sample level {s.level}")
    a = symbol.a
    coeffs = np.array(a.coeffs)
    if exact_even:
        coeffs[(np.arange(a.lo, a.hi + 1) % 2) == 0] = 0.0
    up = _upsample(s.values, 2)
    out = np.convolve(up, coeffs)
    lo = 2 * s.lo + a.lo
    if exact_even:
        start = 2 * s.lo - lo
        out[start:start + len(up):2] = s.values
    return SampleSequence(s.level + 1, lo, out)


def exponential_samples(lams: FrequencyVector, powers: Sequence[int], signs: Sequence[int],
                        k: int, window: tuple[int, int]) -> SampleSequence:
    """Samples at ``j / 2**k`` of ``sum_i t**powers[i] * exp(signs[i] * lams[i] * t)``."""
    if len(powers) != len(signs) or len(powers) > lams.N:
        raise ValueError("powers and signs must align with the frequencies")
    j = np.arange(window[0], window[1] + 1)
    t = j / 2.0 ** k
    vals = np.zeros(len(j))
    for lam, p, sgn in zip(lams.lambdas, powers, signs):
        if p >= lams.multiplicity(lam):
            raise PowerExceedsMultiplicity(f"t^{p} e^(+-{lam} t) is not a solution (multiplicity {lams.multiplicity(lam)})")
        vals += t ** p * np.exp(sgn * lam * t)
    return SampleSequence(k, window[0], vals)


def _sample_fn(fn, k: int, lo: int, hi: int) -> SampleSequence:
    j = np.arange(lo, hi + 1)
    return SampleSequence(k, lo, fn(j / 2.0 ** k))


def refine_samples(s: SampleSequence, lams: FrequencyVector, steps: int) -> tuple[SampleSequence, int, int]:
    """Subdivide ``steps`` times; also return the window not touched by the boundary."""
    N = lams.N
    vlo, vhi = s.lo, s.hi
    for i in range(steps):
        s = subdivide_once(s, symbol_for(lams, s.level))
        vlo, vhi = 2 * vlo + 2 * N - 1, 2 * vhi - (2 * N - 1)
    return s, vlo, vhi


def reproduction_error(lams: FrequencyVector, powers: Sequence[int], signs: Sequence[int],
                       k0: int = 0, steps: int = 4, fn=None) -> float:
    """Max relative error of subdivided samples against the exact function.

    ``fn`` overrides the target (used for negative controls outside the
    reproduced space); otherwise the target is the exponential polynomial
    described by ``powers`` and ``signs``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    M = 2 * lams.N + 1
    if fn is None:
        s = exponential_samples(lams, powers, signs, k0, (-M, M))

        def fn(t):
            out = np.zeros_like(t)
            for lam, p, sgn in zip(lams.lambdas, powers, signs):
                out += t ** p * np.exp(sgn * lam * t)
            return out
    else:
        s = _sample_fn(fn, k0, -M, M)
    fine, vlo, vhi = refine_samples(s, lams, steps)
    exact = fn(np.arange(vlo, vhi + 1) / 2.0 ** (k0 + steps))
    err = np.abs(fine.window(vlo, vhi) - exact)
    return float(np.max(err) / np.max(np.abs(exact)))


@lru_cache(maxsize=512)
def _mask(N: int, xi: float, level: int) -> RefinementMask:
    return refinement_mask(SymbolContext(N, xi, level))


@lru_cache(maxsize=512)
def _symbol(N: int, xi: float, level: int) -> SubdivisionSymbol:
    return a_symbol(SymbolContext(N, xi, level))


def fundamental_function(N: int, xi: float, m: int, L: int) -> DyadicGridFunction:
    """Tabulate ``Phi_m`` by subdividing a delta with ``a^[m], ..., a^[m+L-1]``."""
    if L < 1:
        raise ValueError("L must be >= 1")
    s = SampleSequence(m, 0, np.array([1.0]))
    for level in range(m, m + L):
        s = subdivide_once(s, _symbol(N, float(xi), level))
    return DyadicGridFunction(m, L, s.lo, s.values)


def _cascade(N: int, xi: float, levels: range, first: LaurentPolynomial | None = None) -> tuple[int, np.ndarray]:
    # c(z) = f0(z^(2^(L-1))) g^[m+1](z^(2^(L-2))) ... g^[m+L-1](z)
    lo, c = 0, np.ones(1)
    for i, level in enumerate(levels):
        filt = first if (i == 0 and first is not None) else _mask(N, float(xi), level).g
        c = np.convolve(_upsample(c, 2), filt.coeffs)
        lo = 2 * lo + filt.lo
    return lo, c


def integer_samples(g: np.ndarray) -> np.ndarray:
    """Integer samples of the stationary scaling function of mask ``g``.

    Eigenvector for eigenvalue 1 of ``T[k, n] = g[2k - n]`` normalised to sum 1.
    """
    g = np.asarray(g, dtype=float)
    n = len(g)
    T = np.zeros((n, n))
    for k in range(n):
        for j in range(n):
            if 0 <= 2 * k - j < n:
                T[k, j] = g[2 * k - j]
    w, V = np.linalg.eig(T)
    v = np.real(V[:, np.argmin(np.abs(w - 1.0))])
    return v / v.sum()


def cascade_father(N: int, xi: float, m: int, L: int, seed: str = "pulse") -> DyadicGridFunction:
    """Tabulate the father wavelet ``phi_m`` at spacing ``2**-L``.

    ``seed="pulse"`` runs the cascade from a unit pulse; the discrete norm is
    then exactly 1 and shifted Riemann-sum inner products are exactly
    orthonormal.  ``seed="eigen"`` instead starts from the integer samples of
    the stationary scaling function of ``g^[m+L]``; at ``xi = 0`` this gives
    the exact values at dyadic points.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    lo, c = _cascade(N, xi, range(m, m + L))
    if seed == "eigen":
        c = np.convolve(c, integer_samples(_mask(N, float(xi), m + L).coeffs))
    elif seed != "pulse":
        raise ValueError(f"unknown seed {seed!r}")
    return DyadicGridFunction(m, L, lo, c)


def mother_wavelet(N: int, xi: float, m: int, L: int) -> DyadicGridFunction:
    """``psi_m(t) = sum_j (-1)^j g^[m]_{1-j} phi_{m+1}(2t - j)`` at spacing ``2**-L``."""
    if L < 1:
        raise ValueError("L must be >= 1")
    h = highpass(_mask(N, float(xi), m).g)
    lo, c = _cascade(N, xi, range(m, m + L), first=h)
    return DyadicGridFunction(m, L, lo, c)


def refinement_residual_fundamental(N: int, xi: float, m: int, L: int) -> float:
    """Sup-norm of ``Phi_m - sum_j a^[m]_j Phi_{m+1}(2 . - j)``; both tabulated independently."""
    phi_m = fundamental_function(N, xi, m, L)
    a = _symbol(N, float(xi), m).a
    return _two_scale_residual(phi_m, fundamental_function(N, xi, m + 1, L - 1) if L > 1 else None, a)


def refinement_residual_father(N: int, xi: float, m: int, L: int) -> float:
    phi_m = cascade_father(N, xi, m, L)
    g = _mask(N, float(xi), m).g
    return _two_scale_residual(phi_m, cascade_father(N, xi, m + 1, L - 1) if L > 1 else None, g)


def _two_scale_residual(fine: DyadicGridFunction, coarse: DyadicGridFunction | None,
                        filt: LaurentPolynomial) -> float:
    if coarse is None:
        lo, vals = 0, np.ones(1)
    else:
        lo, vals = coarse.lo, coarse.values
    factor = 2 ** (fine.resolution - 1)
    rhs = np.convolve(_upsample(filt.coeffs, factor), vals)
    rlo = filt.lo * factor + lo
    lo_all = min(rlo, fine.lo)
    hi_all = max(rlo + len(rhs), fine.lo + len(fine.values))
    a = np.zeros(hi_all - lo_all)
    b = np.zeros(hi_all - lo_all)
    a[fine.lo - lo_all:fine.lo - lo_all + len(fine.values)] = fine.values
    b[rlo - lo_all:rlo - lo_all + len(rhs)] = rhs
    return float(np.max(np.abs(a - b)))


def gram_matrix(f: DyadicGridFunction, shifts: Sequence[int]) -> np.ndarray:
    shifts = list(shifts)
    G = np.empty((len(shifts), len(shifts)))
    for i, si in enumerate(shifts):
        for j, sj in enumerate(shifts):
            G[i, j] = f.inner(f, sj - si)
    return G
