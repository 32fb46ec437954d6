"""Laurent and ordinary polynomial arithmetic, unit-circle evaluation and roots.

Everything here is binary64.  Polynomials are immutable; arithmetic returns new
objects in canonical trimmed form.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NonConvergence

__all__ = [
    "LaurentPolynomial",
    "RealPolynomial",
    "ComplexRootSet",
    "multiply",
    "eval_circle",
    "reflect_conjugate",
    "roots",
    "cos_substitute",
    "compose_laurent",
]


def _trim(lo: int, coeffs: np.ndarray) -> tuple[int, np.ndarray]:
    nz = np.flatnonzero(coeffs)
    if nz.size == 0:
        return 0, np.zeros(1, dtype=coeffs.dtype)
    first, last = nz[0], nz[-1]
    return lo + int(first), coeffs[first:last + 1].copy()


@dataclass(frozen=True, eq=False)
class LaurentPolynomial:
    """Finitely supported two-sided sequence ``sum_i coeffs[i] z**(lo + i)``."""

    lo: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs))
        if c.dtype.kind not in "fc":
            c = c.astype(float)
        lo, c = _trim(int(self.lo), c)
        c.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def constant(cls, value: float) -> LaurentPolynomial:
        return cls(0, np.array([value], dtype=float))

    @classmethod
    def monomial(cls, power: int, value: float = 1.0) -> LaurentPolynomial:
        return cls(power, np.array([value], dtype=float))

    @classmethod
    def from_dict(cls, terms: dict[int, float]) -> LaurentPolynomial:
        if not terms:
            return cls.constant(0.0)
        lo, hi = min(terms), max(terms)
        c = np.zeros(hi - lo + 1)
        for k, v in terms.items():
            c[k - lo] += v
        return cls(lo, c)

    @property
    def hi(self) -> int:
        return self.lo + len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def coefficient(self, power: int) -> float:
        i = power - self.lo
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0.0

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients for exponents ``lo..hi`` inclusive, zero padded."""
        out = np.zeros(hi - lo + 1, dtype=self.coeffs.dtype)
        a, b = max(lo, self.lo), min(hi, self.hi)
        if a <= b:
            out[a - lo:b - lo + 1] = self.coeffs[a - self.lo:b - self.lo + 1]
        return out

    def shift(self, k: int) -> LaurentPolynomial:
        """Multiply by ``z**k``."""
        return LaurentPolynomial(self.lo + k, self.coeffs)

    def __add__(self, other):
        if not isinstance(other, LaurentPolynomial):
            other = LaurentPolynomial.constant(other)
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return LaurentPolynomial(lo, self.window(lo, hi) + other.window(lo, hi))

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial(self.lo, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LaurentPolynomial):
            return multiply(self, other)
        return LaurentPolynomial(self.lo, self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return LaurentPolynomial(self.lo, self.coeffs / scalar)

    def __pow__(self, n: int) -> LaurentPolynomial:
        if n < 0:
            raise ValueError("negative powers are not Laurent polynomials")
        out = LaurentPolynomial.constant(1.0)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        powers = np.arange(self.lo, self.hi + 1)
        return np.sum(self.coeffs * z[..., None] ** powers, axis=-1)

    def eval_circle(self, omega):
        return eval_circle(self, omega)

    def reflect(self) -> LaurentPolynomial:
        return reflect_conjugate(self)

    def allclose(self, other: LaurentPolynomial, atol: float = 0.0, rtol: float = 1e-12) -> bool:
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return np.allclose(self.window(lo, hi), other.window(lo, hi), atol=atol, rtol=rtol)

    def as_dict(self) -> dict[int, float]:
        return {self.lo + i: c for i, c in enumerate(self.coeffs) if c != 0}

    def __repr__(self) -> str:
        return f"LaurentPolynomial(lo={self.lo}, coeffs={np.array2string(self.coeffs, precision=6)})"


def multiply(p: LaurentPolynomial, q: LaurentPolynomial) -> LaurentPolynomial:
    return LaurentPolynomial(p.lo + q.lo, np.convolve(p.coeffs, q.coeffs))


def eval_circle(p: LaurentPolynomial, omega):
    """Evaluate ``p(e^{i omega})``; ``omega`` may be scalar or array."""
    omega = np.asarray(omega, dtype=float)
    powers = np.arange(p.lo, p.hi + 1)
    vals = np.exp(1j * omega[..., None] * powers) @ p.coeffs
    if __debug__ and p.coeffs.dtype.kind == "f" and p.lo == -p.hi:
        if np.array_equal(p.coeffs, p.coeffs[::-1]):
            bound = 1e-12 * max(np.abs(p.coeffs).sum(), 1.0)
            assert np.all(np.abs(vals.imag) <= bound)
    return vals[()] if vals.ndim == 0 else vals


def reflect_conjugate(p: LaurentPolynomial) -> LaurentPolynomial:
    """``p(1/z)`` (for real coefficients this is the conjugate on ``|z| = 1``)."""
    return LaurentPolynomial(-p.hi, p.coeffs[::-1])


@dataclass(frozen=True, eq=False)
class RealPolynomial:
    """Ordinary polynomial with coefficients in ascending powers."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        nz = np.flatnonzero(c)
        c = c[:nz[-1] + 1].copy() if nz.size else np.zeros(1)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> float:
        return self.coeffs[-1]

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def __add__(self, other):
        if not isinstance(other, RealPolynomial):
            other = RealPolynomial([other])
        return RealPolynomial(np.polynomial.polynomial.polyadd(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, RealPolynomial):
            other = RealPolynomial([other])
        return RealPolynomial(np.polynomial.polynomial.polysub(self.coeffs, other.coeffs))

    def __mul__(self, other):
        if isinstance(other, RealPolynomial):
            return RealPolynomial(np.convolve(self.coeffs, other.coeffs))
        return RealPolynomial(self.coeffs * other)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> RealPolynomial:
        out = RealPolynomial([1.0])
        for _ in range(n):
            out = out * self
        return out

    def compose(self, inner: RealPolynomial) -> RealPolynomial:
        """``self(inner(x))`` by Horner's rule."""
        out = RealPolynomial([self.coeffs[-1]])
        for c in self.coeffs[-2::-1]:
            out = out * inner + c
        return out

    def __repr__(self) -> str:
        return f"RealPolynomial({np.array2string(self.coeffs, precision=6)})"


def compose_laurent(p: RealPolynomial, inner: LaurentPolynomial) -> LaurentPolynomial:
    """``p(inner(z))`` evaluated by Horner's rule in the Laurent ring."""
    out = LaurentPolynomial.constant(p.coeffs[-1])
    for c in p.coeffs[-2::-1]:
        out = out * inner + c
    return out


def cos_substitute(Q: RealPolynomial) -> RealPolynomial:
    """Return ``Qt`` with ``Qt(cos w) = Q(sin^2(w/2))``, i.e. ``Qt(c) = Q((1 - c)/2)``."""
    return Q.compose(RealPolynomial([0.5, -0.5]))


@dataclass(frozen=True)
class ComplexRootSet:
    roots: tuple[complex, ...]
    multiplicities: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.roots)

    @property
    def degree(self) -> int:
        return sum(self.multiplicities)

    def expanded(self) -> np.ndarray:
        return np.array([r for r, m in zip(self.roots, self.multiplicities) for _ in range(m)],
                        dtype=complex)

    def monic(self) -> RealPolynomial:
        """Real monic polynomial with these roots (ascending coefficients)."""
        c = np.ones(1, dtype=complex)
        for r in self.expanded():
            c = np.convolve(c, [-r, 1.0])
        return RealPolynomial(c.real)

    def map(self, fn) -> ComplexRootSet:
        return ComplexRootSet(tuple(complex(fn(r)) for r in self.roots), self.multiplicities)


def _fujiwara_bound(a: np.ndarray) -> float:
    # a is monic, ascending
    n = len(a) - 1
    terms = [abs(a[n - k]) ** (1.0 / k) for k in range(1, n)]
    terms.append(abs(a[0] / 2.0) ** (1.0 / n))
    return 2.0 * max(terms) if terms else 1.0


def _aberth(a: np.ndarray, tol: float, maxiter: int) -> np.ndarray:
    n = len(a) - 1
    da = a[1:] * np.arange(1, n + 1)
    absa = np.abs(a)
    radius = _fujiwara_bound(a)
    if radius == 0.0:
        return np.zeros(n, dtype=complex)
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles) * (1 + 0.01 * np.arange(n) / n)
    done = np.zeros(n, dtype=bool)
    P = np.polynomial.polynomial.polyval

    def step(z, frozen):
        pz = P(z, a)
        dpz = P(z, da)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            w = pz / dpz
            dz = w / (1.0 - w * s)
        dz[~np.isfinite(dz) | frozen] = 0.0
        return z - dz

    for _ in range(maxiter):
        done |= np.abs(P(z, a)) <= tol * P(np.abs(z), absa)
        if done.all():
            break
        z = step(z, done)
    else:
        raise NonConvergence(f"root iteration did not converge in {maxiter} steps (degree {n})")
    # a couple of unfrozen sweeps take simple roots to full precision
    for _ in range(2):
        z = step(z, np.zeros(n, dtype=bool))
    return z


def _pair_and_group(z: np.ndarray, real_tol: float, merge_tol: float):
    z = np.array(z, dtype=complex)
    mag = np.maximum(1.0, np.abs(z))
    real = np.abs(z.imag) <= real_tol * mag
    z[real] = z[real].real
    upper = [r for r in z[~real] if r.imag > 0]
    lower = [r for r in z[~real] if r.imag < 0]
    paired = []
    if len(upper) != len(lower):
        raise NonConvergence("complex roots do not pair into conjugates")
    for u in upper:
        k = int(np.argmin([abs(u - l.conjugate()) for l in lower]))
        l = lower.pop(k)
        m = 0.5 * (u + l.conjugate())
        paired.append(complex(m.real, abs(m.imag)))
    # a nearly real conjugate pair is a split double real root
    split = [m for m in paired if m.imag <= merge_tol * max(1.0, abs(m))]
    paired = [m for m in paired if m.imag > merge_tol * max(1.0, abs(m))]
    reals = sorted([float(r.real) for r in z[real]] + [m.real for m in split for _ in range(2)])
    groups: list[list] = []
    for r in reals:
        if groups and abs(r - groups[-1][0]) <= merge_tol * max(1.0, abs(r)):
            groups[-1][1].append(r)
        else:
            groups.append([r, [r]])
    out: list[tuple[complex, int]] = [(complex(np.mean(g)), len(g)) for _, g in groups]
    cgroups: list[list] = []
    for u in sorted(paired, key=lambda c: (c.real, c.imag)):
        for g in cgroups:
            if abs(u - g[0]) <= merge_tol * max(1.0, abs(u)):
                g[1].append(u)
                break
        else:
            cgroups.append([u, [u]])
    for _, g in cgroups:
        c = complex(np.mean(g))
        out.append((c, len(g)))
        out.append((c.conjugate(), len(g)))
    out.sort(key=lambda t: (t[0].real, t[0].imag))
    return tuple(r for r, _ in out), tuple(m for _, m in out)


def roots(p: RealPolynomial, tol: float = 1e-12, maxiter: int = 500,
          merge_tol: float = 1e-7) -> ComplexRootSet:
    """All complex roots of a real polynomial by Aberth-Ehrlich iteration.

    Roots with ``|Im| <= 1e-10`` (relative) are snapped to the real axis, the
    rest are paired with their conjugates and symmetrised so that conjugate
    partners are exact.  Roots closer than ``merge_tol`` (relative) are
    reported once with a multiplicity.  Output is sorted by (real, imag).
    """
    if p.degree < 1:
        raise ValueError("roots() needs a polynomial of degree >= 1")
    a = np.asarray(p.coeffs, dtype=float) / p.lead
    # exact zero roots first
    nzero = int(np.flatnonzero(a)[0])
    a = a[nzero:]
    found = np.zeros(nzero, dtype=complex)
    if len(a) == 2:
        found = np.append(found, -a[0])
    elif len(a) > 2:
        found = np.append(found, _aberth(a, tol, maxiter))
    r, m = _pair_and_group(found, 1e-10, merge_tol)
    return ComplexRootSet(r, m)


def from_roots(rs: Iterable[complex], lead: float = 1.0) -> RealPolynomial:
    c = np.ones(1, dtype=complex)
    for r in rs:
        c = np.convolve(c, [-r, 1.0])
    return RealPolynomial(lead * c.real)


def as_laurent(p: RealPolynomial | Sequence[float], lo: int = 0) -> LaurentPolynomial:
    coeffs = p.coeffs if isinstance(p, RealPolynomial) else np.asarray(p, dtype=float)
    return LaurentPolynomial(lo, coeffs)
