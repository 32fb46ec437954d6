"""Invariant suite for one (N, xi, level) configuration."""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .factorization import (
    TOL_FACTORIZATION,
    TOL_QMF,
    classical_mask,
    factorization_residual,
    qmf_residual,
    refinement_mask,
)
from .errors import SingularSystem
from .laurent import LaurentPolynomial, RealPolynomial
from .subdivision import (
    cascade_father,
    fundamental_function,
    gram_matrix,
    refinement_residual_father,
    refinement_residual_fundamental,
    reproduction_error,
)
from .symbols import (
    SymbolContext,
    a_symbol,
    bezout_residual,
    bezout_solve,
    p_polynomial,
    q_leading_coefficient,
    q_polynomial_closed_form,
    q_zeros,
    verify_symbol,
)


@dataclass
class Check:
    name: str
    value: float
    tol: float
    kind: str = "max"  # "max": value <= tol, "min": value >= tol, "skip": not evaluated
    note: str = ""

    @property
    def passed(self) -> bool:
        if self.kind == "skip":
            return True
        if not np.isfinite(self.value):
            return False
        return bool(self.value <= self.tol if self.kind == "max" else self.value >= self.tol)

    def to_dict(self) -> dict:
        d = asdict(self)
        if not np.isfinite(self.value):
            d["value"] = None
        d["passed"] = bool(self.passed)
        return d

    def line(self) -> str:
        if self.kind == "skip":
            return f"SKIP  {self.name:<34} {self.note}"
        op = "<=" if self.kind == "max" else ">="
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<34} {self.value: .3e}  ({op} {self.tol:.0e})"


def grid_size() -> int:
    return int(os.environ.get("POLYWAVE_GRID", "512"))


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def check_mask_coeffs(ctx: SymbolContext, g: np.ndarray, grid: int) -> list[Check]:
    """Checks on an externally supplied mask for ``ctx``."""
    a = a_symbol(ctx).a
    gl = LaurentPolynomial(0, np.asarray(g, float))
    return [
        Check("mask length", abs(len(g) - 2 * ctx.N), 0),
        Check("factorization residual", factorization_residual(gl, a, grid), TOL_FACTORIZATION),
        Check("qmf residual", qmf_residual(g), TOL_QMF),
    ]


def check_symbol_coeffs(ctx: SymbolContext, lo: int, coeffs, grid: int) -> list[Check]:
    ref = a_symbol(ctx).a
    got = LaurentPolynomial(lo, np.asarray(coeffs, float))
    lo_, hi_ = min(got.lo, ref.lo), max(got.hi, ref.hi)
    return [Check("symbol coefficient match", float(np.max(np.abs(got.window(lo_, hi_) - ref.window(lo_, hi_)))), 1e-10)]


def run_suite(N: int, xi: float, level: int = 0, grid: Optional[int] = None, L: int = 10) -> list[Check]:
    grid = grid or grid_size()
    ctx = SymbolContext(N, xi, level)
    checks: list[Check] = []

    P = p_polynomial(ctx.lams, level)
    Q = q_polynomial_closed_form(ctx)
    res = bezout_residual(P, Q)
    if N <= 8:
        checks.append(Check("bezout residual", res, 1e-10))
    x = np.linspace(0.0, 1.0, 200)
    Pa, Qa = RealPolynomial(np.abs(P.coeffs)), RealPolynomial(np.abs(Q.coeffs))
    size = float(np.max(Pa(x) * Qa(x) + Pa(1 - x) * Qa(1 - x)))
    checks.append(Check("bezout residual / term size", res / size, 1e-13))
    try:
        Qb = bezout_solve(P)
        checks.append(Check("closed form vs bezout solve", _rel(Q.coeffs, Qb.coeffs), 1e-9))
    except SingularSystem as exc:
        checks.append(Check("closed form vs bezout solve", float("nan"), 1e-9, "skip", str(exc)))
    if N > 1:
        rebuilt = q_zeros(ctx).monic() * q_leading_coefficient(ctx)
        checks.append(Check("Q rebuilt from zeros", _rel(rebuilt.coeffs, Q.coeffs), 1e-8))
    x = x[1:-1]
    checks.append(Check("min Q on (0,1)", float(np.min(Q(x))), 0.0, "min"))

    rep = verify_symbol(a_symbol(ctx), grid)
    checks.append(Check("symbol symmetry defect", rep.symmetry_defect, 1e-10))
    checks.append(Check("symbol min on circle", rep.min_circle_value, -1e-12, "min"))
    checks.append(Check("interpolatory a(z)+a(-z)-2", rep.interpolatory_defect, 1e-10))
    checks.append(Check("interpolatory a_2j - delta", rep.coefficient_defect, 1e-10))

    mask = refinement_mask(ctx)
    checks.append(Check("factorization residual", mask.factorization_residual(grid), TOL_FACTORIZATION))
    checks.append(Check("qmf residual", mask.qmf_residual(), TOL_QMF))
    checks.append(Check("g(1) - 2 sqrt(Q(0))", abs(mask.g(1.0).real - 2 * np.sqrt(Q(0.0))), 1e-10))
    if xi == 0:
        classical = classical_mask(N).window(0, 2 * N - 1)
        checks.append(Check("classical limit (xi=0) match", float(np.max(np.abs(mask.coeffs - classical))), 1e-9))

    if xi > 0:
        worst = 0.0
        for ell in range(N):
            for sgn in (1, -1):
                worst = max(worst, reproduction_error(ctx.lams, [ell], [sgn], level, 4))
        checks.append(Check("exponential reproduction", worst, 1e-9))
    else:
        worst = max(reproduction_error(ctx.lams, [p], [1], level, 4) for p in range(2 * N))
        checks.append(Check("polynomial reproduction", worst, 1e-9))

    checks.append(Check("Phi refinement residual", refinement_residual_fundamental(N, xi, level, L), 1e-8))
    checks.append(Check("phi refinement residual", refinement_residual_father(N, xi, level, L), 1e-8))
    Phi = fundamental_function(N, xi, level, L)
    ints = Phi.integer_samples(-2 * N, 2 * N)
    delta = (np.arange(-2 * N, 2 * N + 1) == 0).astype(float)
    checks.append(Check("Phi integer samples - delta", float(np.max(np.abs(ints - delta))), 0.0))
    phi = cascade_father(N, xi, level, L)
    G = gram_matrix(phi, range(-3, 4))
    checks.append(Check("phi Gram matrix - I", float(np.max(np.abs(G - np.eye(7)))), 1e-5))
    auto = np.array([phi.inner(phi, j) for j in range(-2 * N, 2 * N + 1)])
    checks.append(Check("phi autocorrelation - Phi(j)", float(np.max(np.abs(auto - ints))), 1e-5))
    return checks
