"""Non-stationary subdivision symbols for exponential-polynomial reproduction.

Two routes build the symbol ``a(z) = 2 d(z) b(z)``: a general route for any
frequency vector (numeric Bezout solve) and the polyharmonic route, where all
frequencies equal ``xi`` and the Bezout solution has a closed form in terms
of the Daubechies polynomial.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import OrderTooLarge, SingularSystem
from .laurent import (
    ComplexRootSet,
    LaurentPolynomial,
    RealPolynomial,
    compose_laurent,
    eval_circle,
    roots,
)

TOL_SYMMETRY = 1e-10
TOL_INTERPOLATORY = 1e-10
TOL_NONNEGATIVE = 1e-12


@dataclass(frozen=True)
class FrequencyVector:
    """Upper half ``0 <= l1 <= ... <= lN`` of the symmetric frequency vector."""

    lambdas: tuple[float, ...]

    def __post_init__(self):
        lams = tuple(float(v) for v in self.lambdas)
        if not lams:
            raise ValueError("need at least one frequency")
        if any(v < 0 for v in lams):
            raise ValueError("frequencies must be nonnegative")
        if any(b < a for a, b in zip(lams, lams[1:])):
            raise ValueError("frequencies must be sorted ascending")
        object.__setattr__(self, "lambdas", lams)

    @classmethod
    def polyharmonic(cls, N: int, xi: float) -> FrequencyVector:
        return cls((float(xi),) * N)

    @property
    def N(self) -> int:
        return len(self.lambdas)

    @property
    def is_polyharmonic(self) -> bool:
        return len(set(self.lambdas)) == 1

    def multiplicity(self, lam: float) -> int:
        """Multiplicity of ``lam`` as a root of the characteristic polynomial.

        Zero appears with both signs, so it counts twice.
        """
        m = sum(1 for v in self.lambdas if v == abs(lam))
        return 2 * m if lam == 0 else m


@dataclass(frozen=True)
class SymbolContext:
    N: int
    xi: float
    level: int = 0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.xi < 0:
            raise ValueError("xi must be >= 0")
        if self.level < 0:
            raise ValueError("level must be >= 0")
        if not self.eta > 0:
            raise ValueError(f"xi / 2^(level+1) = {self.t} is too large for binary64")

    @property
    def t(self) -> float:
        return self.xi / 2.0 ** (self.level + 1)

    @property
    def x0(self) -> float:
        return math.exp(-self.t)

    @property
    def eta(self) -> float:
        return 1.0 / math.cosh(self.t / 2.0) ** 2 if self.t < 1400 else 0.0

    @property
    def lams(self) -> FrequencyVector:
        return FrequencyVector.polyharmonic(self.N, self.xi)

    def at_level(self, level: int) -> SymbolContext:
        return SymbolContext(self.N, self.xi, level)


@dataclass(frozen=True, eq=False)
class SubdivisionSymbol:
    level: int
    a: LaurentPolynomial
    context: Optional[SymbolContext] = None
    lams: Optional[FrequencyVector] = None

    @property
    def N(self) -> int:
        return (self.a.hi + 1) // 2

    def to_dict(self) -> dict:
        ctx = self.context
        return {
            "N": self.N,
            "xi": ctx.xi if ctx else None,
            "level": self.level,
            "lo": self.a.lo,
            "coeffs": [float(c) for c in self.a.coeffs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> SubdivisionSymbol:
        ctx = None
        if d.get("xi") is not None:
            ctx = SymbolContext(int(d["N"]), float(d["xi"]), int(d["level"]))
        return cls(int(d["level"]), LaurentPolynomial(int(d["lo"]), np.array(d["coeffs"], float)), ctx)


def daubechies_polynomial(N: int) -> RealPolynomial:
    """``R_N(y) = sum_{j<N} C(N+j-1, j) y^j``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > 16:
        raise OrderTooLarge(f"N = {N} > 16")
    return RealPolynomial([float(math.comb(N + j - 1, j)) for j in range(N)])


def _weights(lams: FrequencyVector, k: int) -> list[float]:
    return [math.exp(-lam / 2.0 ** (k + 1)) for lam in lams.lambdas]


def d_symbol(lams: FrequencyVector, k: int) -> LaurentPolynomial:
    if k < 0:
        raise ValueError("level must be >= 0")
    d = LaurentPolynomial.constant(1.0)
    for x in _weights(lams, k):
        factor = LaurentPolynomial(-1, np.array([x, 1.0 + x * x, x]))
        d = d * (factor / (1.0 + x) ** 2)
    return d


def p_polynomial(lams: FrequencyVector, k: int) -> RealPolynomial:
    if k < 0:
        raise ValueError("level must be >= 0")
    P = RealPolynomial([1.0])
    for x in _weights(lams, k):
        P = P * RealPolynomial([1.0, -4.0 * x / (1.0 + x) ** 2])
    return P


def _reflect_poly(P: RealPolynomial) -> RealPolynomial:
    # P(1 - x)
    return P.compose(RealPolynomial([1.0, -1.0]))


def bezout_residual(P: RealPolynomial, Q: RealPolynomial, n: int = 200) -> float:
    x = np.linspace(0.0, 1.0, n)
    return float(np.max(np.abs(P(x) * Q(x) + P(1 - x) * Q(1 - x) - 1.0)))


def bezout_solve(P: RealPolynomial, cond_limit: float = 1e13) -> RealPolynomial:
    """Unique ``Q`` of degree < N with ``P(x)Q(x) + P(1-x)Q(1-x) = 1``.

    Solves ``P(x) Q1(x) + P(1-x) Q2(x) = 1`` for two unknown polynomials of
    degree N-1 by coefficient matching; uniqueness forces ``Q2(x) = Q1(1-x)``.
    """
    N = P.degree
    if N < 1:
        raise ValueError("P must have degree >= 1")
    Pr = _reflect_poly(P)
    A = np.zeros((2 * N, 2 * N))
    for j in range(N):
        A[j:j + N + 1, j] = P.coeffs
        A[j:j + len(Pr.coeffs), N + j] = Pr.coeffs
    rhs = np.zeros(2 * N)
    rhs[0] = 1.0
    if not np.all(np.isfinite(A)):
        raise SingularSystem("Bezout system has non-finite entries")
    cond = np.linalg.cond(A)
    if cond > cond_limit:
        raise SingularSystem(f"Bezout system condition number {cond:.2e} exceeds {cond_limit:.0e}; "
                             "P(x) and P(1-x) (nearly) share a zero")
    sol = np.linalg.solve(A, rhs)
    return RealPolynomial(sol[:N])


def q_polynomial_closed_form(ctx: SymbolContext) -> RealPolynomial:
    N, eta = ctx.N, ctx.eta
    if eta == 1.0:
        return daubechies_polynomial(N)
    s = 2.0 - eta
    inner = RealPolynomial([(1.0 - eta) / s, eta / s])
    return daubechies_polynomial(N).compose(inner) * s ** (-N)


def q_leading_coefficient(ctx: SymbolContext) -> float:
    N, eta = ctx.N, ctx.eta
    lead_r = math.factorial(2 * N - 2) / math.factorial(N - 1) ** 2
    return (2.0 - eta) ** (-2 * N + 1) * eta ** (N - 1) * lead_r


def daubechies_zeros(N: int) -> ComplexRootSet:
    if N == 1:
        return ComplexRootSet((), ())
    return roots(daubechies_polynomial(N))


def q_zeros(ctx: SymbolContext) -> ComplexRootSet:
    """Zeros of ``Q`` obtained from the zeros of the Daubechies polynomial."""
    eta = ctx.eta
    if eta <= 0:
        raise ValueError("eta must be positive")
    return daubechies_zeros(ctx.N).map(lambda c: (c * (2.0 - eta) + eta - 1.0) / eta)


# x = sin^2(w/2) = 1/2 - (z + 1/z)/4
HALF_ANGLE = LaurentPolynomial(-1, np.array([-0.25, 0.5, -0.25]))


def b_symbol(Q: RealPolynomial) -> LaurentPolynomial:
    return compose_laurent(Q, HALF_ANGLE)


def a_symbol(ctx: SymbolContext) -> SubdivisionSymbol:
    """Polyharmonic symbol ``a^[k](z) = 2 d(z) b(z)`` from the closed-form Q."""
    x0, N = ctx.x0, ctx.N
    factor = LaurentPolynomial(-1, np.array([x0, 1.0 + x0 * x0, x0])) / (1.0 + x0) ** 2
    d = factor ** N
    a = 2.0 * d * b_symbol(q_polynomial_closed_form(ctx))
    return SubdivisionSymbol(ctx.level, a, ctx, ctx.lams)


def general_symbol(lams: FrequencyVector, k: int) -> SubdivisionSymbol:
    """Symbol for an arbitrary frequency vector via the numeric Bezout solve."""
    Q = bezout_solve(p_polynomial(lams, k))
    a = 2.0 * d_symbol(lams, k) * b_symbol(Q)
    ctx = SymbolContext(lams.N, lams.lambdas[0], k) if lams.is_polyharmonic else None
    return SubdivisionSymbol(k, a, ctx, lams)


def symbol_for(lams: FrequencyVector, k: int) -> SubdivisionSymbol:
    if lams.is_polyharmonic:
        return a_symbol(SymbolContext(lams.N, lams.lambdas[0], k))
    return general_symbol(lams, k)


@dataclass
class SymbolReport:
    symmetry_defect: float
    min_circle_value: float
    argmin_omega: float
    interpolatory_defect: float
    coefficient_defect: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = (
            self.symmetry_defect <= TOL_SYMMETRY
            and self.interpolatory_defect <= TOL_INTERPOLATORY
            and self.coefficient_defect <= TOL_INTERPOLATORY
            and self.min_circle_value >= -TOL_NONNEGATIVE
        )


def verify_symbol(s: SubdivisionSymbol, grid_size: int = 512) -> SymbolReport:
    if grid_size < 64:
        raise ValueError("grid_size must be >= 64")
    a = s.a
    m = max(-a.lo, a.hi)
    c = a.window(-m, m)
    sym = float(np.max(np.abs(c - c[::-1])))
    omega = 2 * np.pi * np.arange(grid_size) / grid_size
    vals = np.real(eval_circle(a, omega))
    vals_neg = np.real(eval_circle(a, omega + np.pi))
    even = c[(np.arange(-m, m + 1) % 2) == 0]
    delta = (np.arange(-m, m + 1)[(np.arange(-m, m + 1) % 2) == 0] == 0).astype(float)
    k = int(np.argmin(vals))
    return SymbolReport(
        symmetry_defect=sym,
        min_circle_value=float(vals[k]),
        argmin_omega=float(omega[k]),
        interpolatory_defect=float(np.max(np.abs(vals + vals_neg - 2.0))),
        coefficient_defect=float(np.max(np.abs(even - delta))),
    )
