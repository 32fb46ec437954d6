import mpmath as mp
import numpy as np
import pytest

from polywave.errors import NegativeOnCircle
from polywave.laurent import LaurentPolynomial, RealPolynomial, cos_substitute
from polywave.factorization import (
    RefinementMask,
    classical_mask,
    factorization_residual,
    highpass,
    mask_family,
    qmf_residual,
    refinement_mask,
    riesz_factor,
)
from polywave.symbols import SymbolContext, a_symbol, daubechies_polynomial, q_polynomial_closed_form

S3 = np.sqrt(3.0)
D4 = np.array([1 + S3, 3 + S3, 3 - S3, 1 - S3]) / 4

# classical orthonormal filters as commonly tabulated (unit norm, ~12 correct digits)
DB_TABLE = {
    3: [0.3326705529509569, 0.8068915093133388, 0.4598775021193313,
        -0.13501102001039084, -0.08544127388224149, 0.035226291882100656],
    4: [0.23037781330885523, 0.7148465705525415, 0.6308807679295904, -0.02798376941698385,
        -0.18703481171888114, 0.030841381835986965, 0.032883011666982945, -0.010597401784997278],
}


def mask(N, xi, level=0) -> RefinementMask:
    return refinement_mask(SymbolContext(N, xi, level))


def companion_oracle_mask(N):
    """Minimum-phase factor built with numpy's companion-matrix roots."""
    Qt = cos_substitute(daubechies_polynomial(N))
    cs = np.roots(Qt.coeffs[::-1]) if N > 1 else np.array([])
    g = np.array([1.0 + 0j])
    for c in cs:
        r = np.roots([1.0, -2 * c, 1.0])
        r = r[np.argmin(np.abs(r))]
        g = np.convolve(g, [1.0, -r])
    g = np.convolve(g.real, np.ones(1))
    for _ in range(N):
        g = np.convolve(g, [0.5, 0.5])
    return g * 2 / np.sum(g)


def test_d4_golden():
    assert np.max(np.abs(mask(2, 0.0).coeffs - D4)) <= 1e-10


@pytest.mark.parametrize("xi", [0.0, 0.3, 1.0, 4.0, 25.0])
def test_first_order_closed_form(xi):
    x0 = np.exp(-xi / 2)
    expected = np.array([np.sqrt(2) * x0, np.sqrt(2)]) / np.sqrt(1 + x0 ** 2)
    assert np.max(np.abs(mask(1, xi).coeffs - expected)) <= 1e-12


@pytest.mark.parametrize("N", [3, 4])
def test_classical_table(N):
    ref = np.sqrt(2) * np.array(DB_TABLE[N])
    assert np.max(np.abs(mask(N, 0.0).coeffs - ref)) <= 1e-11


def mp_classical_mask(N, dps=50):
    """Minimum-phase classical mask in 50-digit arithmetic."""
    with mp.workdps(dps):
        # R_N((1 - c)/2) expanded in powers of c
        coeffs = [mp.mpf(0)] * N
        for j in range(N):
            for i in range(j + 1):
                coeffs[i] += mp.binomial(N + j - 1, j) * mp.binomial(j, i) * (-1) ** i / mp.mpf(2) ** j
        cs = mp.polyroots(coeffs[::-1], maxsteps=200, extraprec=200) if N > 1 else []
        g = [mp.mpc(1)]
        for c in cs:
            s = mp.sqrt(c * c - 1)
            r = c + s if abs(c + s) < 1 else c - s
            g = [(g[i] if i < len(g) else 0) - r * (g[i - 1] if i else 0) for i in range(len(g) + 1)]
        for _ in range(N):
            g = [((g[i] if i < len(g) else 0) + (g[i - 1] if i else 0)) / 2 for i in range(len(g) + 1)]
        total = sum(g)
        return np.array([float((2 * x / total).real) for x in g])


@pytest.mark.parametrize("N", [2, 3, 4, 6, 8, 10])
def test_high_precision_oracle(N):
    assert np.max(np.abs(mask(N, 0.0).coeffs - mp_classical_mask(N))) <= 1e-13


@pytest.mark.parametrize("N", range(1, 7))
def test_companion_oracle(N):
    assert np.max(np.abs(mask(N, 0.0).coeffs - companion_oracle_mask(N))) <= 1e-9


@pytest.mark.parametrize("N", range(1, 7))
def test_classical_path(N):
    assert np.max(np.abs(mask(N, 0.0).coeffs - classical_mask(N).window(0, 2 * N - 1))) <= 1e-9


@pytest.mark.parametrize("N", [1, 2, 3, 5, 8, 10])
@pytest.mark.parametrize("xi", [0.0, 1.0, 4.0, 32.0])
@pytest.mark.parametrize("level", [0, 3])
def test_factorization_and_qmf(N, xi, level):
    m = mask(N, xi, level)
    assert m.factorization_residual() <= 1e-9
    assert m.qmf_residual() <= 1e-9
    assert len(m.coeffs) == 2 * N


@pytest.mark.parametrize("N,xi", [(2, 1.0), (4, 4.0), (6, 0.0)])
def test_highpass_complementarity(N, xi):
    g = mask(N, xi).g
    h = highpass(g)
    lo, hi = min(g.lo, h.lo) - 2 * N, max(g.hi, h.hi) + 2 * N
    gw, hw = g.window(lo, hi), h.window(lo, hi)
    for l in range(-N, N + 1):
        shifted = np.roll(gw, -2 * l)
        assert abs(np.dot(hw, shifted)) <= 1e-10


def test_mask_value_at_one():
    for N, xi in [(2, 1.0), (3, 5.0)]:
        Q0 = q_polynomial_closed_form(SymbolContext(N, xi))(0.0)
        assert mask(N, xi).g(1.0).real == pytest.approx(2 * np.sqrt(Q0), abs=1e-12)


def test_non_stationarity_is_observable():
    m0, m2 = mask(3, 4.0, 0), mask(3, 4.0, 2)
    assert np.max(np.abs(m0.coeffs - m2.coeffs)) > 1e-3


@pytest.mark.parametrize("N,xi", [(1, 1.0), (2, 2.0), (4, 4.0)])
def test_first_order_approach_to_classical(N, xi):
    # masks approach the classical filter linearly in t = xi / 2^(level+1)
    ref = classical_mask(N).window(0, 2 * N - 1)
    errs = [np.max(np.abs(mask(N, xi, m).coeffs - ref)) for m in (14, 16, 18, 20)]
    t = xi / 2.0 ** 21
    assert errs[-1] <= 2 * N * t * 10
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.allclose(ratios, 4.0, rtol=0.02)


def test_mask_family_levels():
    fam = mask_family(2, 3.0, 3, base_level=2)
    assert [m.context.level for m in fam] == [2, 3, 4]


def test_riesz_rejects_negative():
    with pytest.raises(NegativeOnCircle):
        riesz_factor(RealPolynomial([-0.5, 1.0]), 1.0)


def test_riesz_of_constant():
    q = riesz_factor(RealPolynomial([4.0]), 1.0)
    assert q.allclose(LaurentPolynomial.constant(2.0))


def test_riesz_with_unimodular_double_zero():
    # (c - 0.2)^2 vanishes on the circle; its factor has a double zero there
    Qt = RealPolynomial([-0.2, 1.0]) ** 2
    q = riesz_factor(Qt, 1.0)
    w = np.linspace(0, np.pi, 33)
    assert np.allclose(np.abs(q.eval_circle(w)) ** 2, Qt(np.cos(w)), atol=1e-8)


def test_factorization_residual_detects_corruption():
    ctx = SymbolContext(3, 1.0)
    g = mask(3, 1.0).g + LaurentPolynomial.monomial(0, 1e-4)
    assert factorization_residual(g, a_symbol(ctx).a) > 1e-5
    assert qmf_residual(g.window(0, 5)) > 1e-5


def test_mask_dict():
    d = mask(2, 1.0).to_dict()
    assert d["kind"] == "mask" and d["lo"] == 0 and len(d["coeffs"]) == 4
