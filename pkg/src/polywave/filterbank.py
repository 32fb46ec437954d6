"""Orthogonal non-stationary filter bank for signals and images.

Each analysis stage convolves (periodically) with ``g^[m] / sqrt(2)`` and its
alternating flip and keeps every second sample.  The finest stage uses mask
level ``base_level + depth - 1``, the coarsest uses ``base_level``.

Images are handled per row frequency: a unitary real DFT along the width,
then the columns of frequency ``f`` go through the 1-D bank built for
``xi = f``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BadLength, ShapeMismatch
from .factorization import RefinementMask, highpass, mask_family
from .laurent import LaurentPolynomial

log = logging.getLogger(__name__)

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class FilterBankPlan:
    N: int
    xi: float
    base_level: int
    depth: int
    masks: tuple[RefinementMask, ...]

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if len(self.masks) != self.depth:
            raise ValueError("need one mask per level")

    def stage_filters(self, stage: int) -> tuple[LaurentPolynomial, LaurentPolynomial]:
        """Low/high-pass pair for ``stage`` (0 = finest)."""
        g = self.masks[self.depth - 1 - stage].g
        return g, highpass(g)


@lru_cache(maxsize=1024)
def make_plan(N: int, xi: float, depth: int, base_level: int = 0) -> FilterBankPlan:
    masks = tuple(mask_family(N, float(xi), depth, base_level))
    return FilterBankPlan(N, float(xi), base_level, depth, masks)


@dataclass(eq=False)
class CoefficientPyramid:
    approx: np.ndarray
    details: list[np.ndarray]
    length: int

    @property
    def depth(self) -> int:
        return len(self.details)

    def energy(self) -> float:
        return float(np.sum(self.approx ** 2) + sum(np.sum(d ** 2) for d in self.details))

    def copy(self) -> CoefficientPyramid:
        return CoefficientPyramid(self.approx.copy(), [d.copy() for d in self.details], self.length)

    def to_dict(self) -> dict:
        return {
            "length": self.length,
            "approx": [float(v) for v in self.approx],
            "details": [[float(v) for v in d] for d in self.details],
        }

    @classmethod
    def from_dict(cls, d: dict) -> CoefficientPyramid:
        return cls(np.asarray(d["approx"], float), [np.asarray(x, float) for x in d["details"]],
                   int(d["length"]))


def _indices(n_out: int, filt: LaurentPolynomial, period: int) -> np.ndarray:
    k = np.arange(n_out)[:, None]
    i = np.arange(len(filt.coeffs))[None, :]
    return (2 * k + filt.lo + i) % period


def _analysis_step(x: np.ndarray, g: LaurentPolynomial, h: LaurentPolynomial):
    M = len(x)
    lo = x[_indices(M // 2, g, M)] @ g.coeffs / SQRT2
    hi = x[_indices(M // 2, h, M)] @ h.coeffs / SQRT2
    return lo, hi


def _synthesis_step(lo: np.ndarray, hi: np.ndarray, g: LaurentPolynomial, h: LaurentPolynomial):
    M = 2 * len(lo)
    x = np.zeros(M, dtype=np.result_type(lo, hi, float))
    np.add.at(x, _indices(len(lo), g, M), lo[:, None] * g.coeffs[None, :] / SQRT2)
    np.add.at(x, _indices(len(hi), h, M), hi[:, None] * h.coeffs[None, :] / SQRT2)
    return x


def analyze_1d(signal, plan: FilterBankPlan) -> CoefficientPyramid:
    x = np.asarray(signal, dtype=float)
    if x.ndim != 1:
        raise ShapeMismatch("signal must be one-dimensional")
    if len(x) == 0 or len(x) % 2 ** plan.depth:
        raise BadLength(f"length {len(x)} not divisible by 2^J = {2 ** plan.depth}")
    if not np.all(np.isfinite(x)):
        raise ValueError("signal contains non-finite values")
    details = []
    for stage in range(plan.depth):
        g, h = plan.stage_filters(stage)
        x, d = _analysis_step(x, g, h)
        details.append(d)
    return CoefficientPyramid(x, details, len(signal))


def synthesize_1d(pyr: CoefficientPyramid, plan: FilterBankPlan) -> np.ndarray:
    if pyr.depth != plan.depth:
        raise ShapeMismatch(f"pyramid depth {pyr.depth} != plan depth {plan.depth}")
    expected = [pyr.length >> (s + 1) for s in range(plan.depth)]
    got = [len(d) for d in pyr.details]
    if got != expected or len(pyr.approx) != expected[-1]:
        raise ShapeMismatch(f"detail lengths {got} do not match signal length {pyr.length}")
    x = pyr.approx
    for stage in reversed(range(plan.depth)):
        g, h = plan.stage_filters(stage)
        x = _synthesis_step(x, pyr.details[stage], g, h)
    return x


@dataclass(eq=False)
class ImageBuffer:
    width: int
    height: int
    pixels: np.ndarray
    maxval: int = 255

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=float).reshape(self.height, self.width)

    @classmethod
    def from_array(cls, arr, maxval: int = 255) -> ImageBuffer:
        arr = np.asarray(arr, dtype=float)
        return cls(arr.shape[1], arr.shape[0], arr, maxval)


@dataclass(eq=False)
class ImagePyramids:
    """Per row-frequency pyramids (real part, imaginary part), frequencies 0..W//2."""

    width: int
    height: int
    N: int
    depth: int
    base_level: int
    bands: list[tuple[CoefficientPyramid, CoefficientPyramid]]
    maxval: int = 255

    def weights(self) -> np.ndarray:
        w = np.full(len(self.bands), 2.0)
        w[0] = 1.0
        if self.width % 2 == 0:
            w[-1] = 1.0
        return w

    def energy(self) -> float:
        return float(sum(wt * (re.energy() + im.energy())
                         for wt, (re, im) in zip(self.weights(), self.bands)))

    def copy(self) -> ImagePyramids:
        return ImagePyramids(self.width, self.height, self.N, self.depth, self.base_level,
                             [(re.copy(), im.copy()) for re, im in self.bands], self.maxval)

    def to_dict(self) -> dict:
        return {
            "kind": "image",
            "width": self.width,
            "height": self.height,
            "N": self.N,
            "depth": self.depth,
            "base_level": self.base_level,
            "maxval": self.maxval,
            "bands": [{"xi": f, "real": re.to_dict(), "imag": im.to_dict()}
                      for f, (re, im) in enumerate(self.bands)],
        }

    @classmethod
    def from_dict(cls, d: dict) -> ImagePyramids:
        bands = [(CoefficientPyramid.from_dict(b["real"]), CoefficientPyramid.from_dict(b["imag"]))
                 for b in d["bands"]]
        return cls(int(d["width"]), int(d["height"]), int(d["N"]), int(d["depth"]),
                   int(d["base_level"]), bands, int(d.get("maxval", 255)))


def analyze_2d(img: ImageBuffer, N: int, J: int, base_level: int = 0) -> ImagePyramids:
    if img.height % 2 ** J:
        raise BadLength(f"height {img.height} not divisible by 2^J = {2 ** J}")
    X = np.fft.rfft(img.pixels, axis=1, norm="ortho")
    bands = []
    for f in range(X.shape[1]):
        plan = make_plan(N, float(f), J, base_level)
        col = X[:, f]
        bands.append((analyze_1d(col.real, plan), analyze_1d(col.imag, plan)))
    return ImagePyramids(img.width, img.height, N, J, base_level, bands, img.maxval)


def synthesize_2d(coeffs: ImagePyramids, return_residue: bool = False):
    W, H = coeffs.width, coeffs.height
    if len(coeffs.bands) != W // 2 + 1:
        raise ShapeMismatch(f"expected {W // 2 + 1} frequency bands, got {len(coeffs.bands)}")
    X = np.zeros((H, W // 2 + 1), dtype=complex)
    for f, (re, im) in enumerate(coeffs.bands):
        plan = make_plan(coeffs.N, float(f), coeffs.depth, coeffs.base_level)
        if re.length != H or im.length != H:
            raise ShapeMismatch(f"band {f} has length {re.length}, image height is {H}")
        X[:, f] = synthesize_1d(re, plan) + 1j * synthesize_1d(im, plan)
    # DC (and Nyquist for even W) must be real for a real image
    self_conj = [0] + ([W // 2] if W % 2 == 0 else [])
    residue = float(np.max(np.abs(X[:, self_conj].imag)))
    scale = max(1.0, float(np.max(np.abs(X))))
    if residue > 1e-8 * scale:
        log.warning("imaginary residue %.3e discarded in synthesis", residue)
    out = ImageBuffer(W, H, np.fft.irfft(X, n=W, axis=1, norm="ortho"), coeffs.maxval)
    return (out, residue) if return_residue else out


def _shrink(c: np.ndarray, tau: float, mode: str) -> np.ndarray:
    if mode == "hard":
        return np.where(np.abs(c) <= tau, 0.0, c)
    if mode == "soft":
        return np.sign(c) * np.maximum(np.abs(c) - tau, 0.0)
    raise ValueError(f"unknown threshold mode {mode!r}")


def threshold_denoise(coeffs, tau: float, mode: str = "soft"):
    """Shrink detail coefficients; the approximation band is never touched."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if isinstance(coeffs, CoefficientPyramid):
        return CoefficientPyramid(coeffs.approx.copy(), [_shrink(d, tau, mode) for d in coeffs.details],
                                  coeffs.length)
    out = coeffs.copy()
    out.bands = [(threshold_denoise(re, tau, mode), threshold_denoise(im, tau, mode))
                 for re, im in coeffs.bands]
    return out
