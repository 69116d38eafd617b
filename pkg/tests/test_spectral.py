import logging

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from gonodyn import (
    CharCoeffs,
    IdentityViolated,
    NotAFixedPoint,
    Stability,
    char_coeffs,
    classify,
    closed_form_fixed_points,
    eigenvalues_closed_form,
    eigenvalues_numeric,
    jacobian,
    preset,
    random_params,
)
from gonodyn.fixed_points import Form
from gonodyn.operator import PARAM_NAMES
from gonodyn.spectral import (
    _p_polynomials,
    merge_clusters,
    numeric_char_coeffs,
    stability_from_spectrum,
)


# -- symbolic oracle -----------------------------------------------------------

@pytest.fixture(scope="module")
def symbolic():
    x, y, u, v = sp.symbols("x y u v")
    c = dict(zip(PARAM_NAMES, sp.symbols(" ".join(PARAM_NAMES))))
    w = sp.Matrix([
        c["a1"] * x * u + c["b1"] * y * u,
        c["c1"] * x * v + c["b2"] * y * u + c["d1"] * y * v,
        c["a2"] * x * u + c["c2"] * x * v + c["b3"] * y * u + c["d2"] * y * v,
        c["b4"] * y * u + c["d3"] * y * v,
    ])
    state = sp.Matrix([x, y, u, v])
    jac = w.jacobian(state)
    lam = sp.Symbol("lam")
    poly = sp.Poly((lam * sp.eye(4) - jac).det(), lam)
    symbols = [c[n] for n in PARAM_NAMES] + [x, y, u, v]
    return {
        "det": sp.expand(jac.det()),
        "jac": sp.lambdify(symbols, jac, "numpy"),
        "coeffs": sp.lambdify(symbols, poly.all_coeffs(), "numpy"),
    }


def _args(params, t):
    return [getattr(params, n) for n in PARAM_NAMES] + list(t)


def test_symbolic_determinant_vanishes(symbolic):
    assert symbolic["det"] == 0


def test_jacobian_matches_symbolic(symbolic, rng):
    for _ in range(200):
        p = random_params(rng)
        t = rng.uniform(-4, 4, 4)
        expected = np.array(symbolic["jac"](*_args(p, t)), dtype=float)
        np.testing.assert_allclose(jacobian(p, t), expected, rtol=1e-14, atol=1e-14)


def test_p1_p2_match_symbolic_everywhere(symbolic, rng):
    for _ in range(200):
        p = random_params(rng)
        t = rng.uniform(-4, 4, 4)
        _, c3, c2, _, c0 = (float(v) for v in symbolic["coeffs"](*_args(p, t)))
        coeffs = _p_polynomials(p, t)
        assert coeffs.p1 == pytest.approx(-c3, abs=1e-12)
        assert coeffs.p2 == pytest.approx(c2, abs=1e-12)
        assert abs(c0) <= 1e-12


def test_all_coefficients_match_symbolic_at_fixed_points(symbolic, w0):
    rng = np.random.default_rng(7)
    cases = [(w0, s) for s in [(1.0, 2.0, 2.0, -0.5), (2.0, 2.0, 2.0, -2 / 3), (-4.0, 2.0, 2.0, -4 / 3)]]
    for fixed in ({}, {"d2": 0.0}, {"b1": 0.0, "b4": 0.0}):
        for _ in range(20):
            p = random_params(rng, **fixed)
            cases += [(p, fp.state) for fp in closed_form_fixed_points(p)[1:]]
    for p, s in cases:
        _, c3, c2, c1, _ = (float(v) for v in symbolic["coeffs"](*_args(p, s)))
        coeffs = char_coeffs(p, s)
        np.testing.assert_allclose([coeffs.p1, coeffs.p2, coeffs.p3], [-c3, c2, c1], rtol=1e-10, atol=1e-10)


def test_numeric_char_coeffs_det_zero(rng):
    for _ in range(100):
        p = random_params(rng)
        t = rng.uniform(-4, 4, 4)
        _, det = numeric_char_coeffs(jacobian(p, t))
        assert abs(det) <= 1e-12 * max(1.0, np.max(np.abs(jacobian(p, t))) ** 4)


# -- closed-form spectrum ------------------------------------------------------

def test_char_coeffs_requires_fixed_point(classical):
    with pytest.raises(NotAFixedPoint):
        char_coeffs(classical, (1.0, 0.0, 1.0, 0.0))


def test_identity_violation_raises():
    with pytest.raises(IdentityViolated):
        eigenvalues_closed_form(CharCoeffs(1.0, 1.0, 1.0))


p1_values = st.floats(-10, 10, allow_nan=False)


def _on_identity(p1, p2):
    # p3 chosen so that 2 is a root
    return CharCoeffs(p1, p2, -8.0 + 4.0 * p1 - 2.0 * p2)


@settings(max_examples=200)
@given(p1=p1_values)
def test_minus_one_root_condition(p1):
    spectrum = eigenvalues_closed_form(_on_identity(p1, p1 - 3.0))
    assert np.min(np.abs(spectrum + 1.0)) <= 1e-8


@settings(max_examples=200)
@given(p1=p1_values)
def test_plus_one_root_condition(p1):
    spectrum = eigenvalues_closed_form(_on_identity(p1, 3.0 * p1 - 7.0))
    assert np.min(np.abs(spectrum - 1.0)) <= 1e-8


@settings(max_examples=200)
@given(p1=p1_values, p2=st.floats(-10, 10, allow_nan=False))
def test_closed_form_roots_satisfy_polynomial(p1, p2):
    coeffs = _on_identity(p1, p2)
    for lam in eigenvalues_closed_form(coeffs):
        value = lam ** 4 - p1 * lam ** 3 + p2 * lam ** 2 + coeffs.p3 * lam
        scale = max(1.0, abs(lam)) ** 4 * max(1.0, abs(p1), abs(p2), abs(coeffs.p3))
        assert abs(value) <= 1e-10 * scale


def test_form_iv_spectrum(rng):
    # at (0, 1/b3, 1/b2, 0) the nontrivial eigenvalues are a1/b2 and d3/b3
    for _ in range(200):
        p = random_params(rng, b1=0.0, b4=0.0)
        s = (0.0, 1 / p.b3, 1 / p.b2, 0.0)
        spectrum = eigenvalues_numeric(jacobian(p, s))
        for lam in (0.0, 2.0, p.a1 / p.b2, p.d3 / p.b3):
            assert np.min(np.abs(spectrum - lam)) <= 1e-8 * max(1.0, abs(lam))


def test_form_iv_nonhyperbolic_condition(rng):
    p = random_params(rng, b1=0.0, b4=0.0)
    # force a1 = b2 by rebalancing the a and b groups
    b2 = 0.4
    p = p.replace(a1=b2, a2=1 - b2, b2=b2, b3=1 - b2)
    assert classify(p, (0.0, 1 / p.b3, 1 / p.b2, 0.0)).tag is Stability.Nonhyperbolic


def test_classical_form_ii_closed_form(classical):
    spectrum = eigenvalues_closed_form(char_coeffs(classical, (2.0, 0.0, 2.0, 0.0)))
    np.testing.assert_allclose(spectrum.real, [-0.5, 0.0, 1.0, 2.0], atol=1e-12)


# -- clustering and classification --------------------------------------------

def test_merge_clusters():
    merged = merge_clusters(np.array([2.0 + 3e-7, 2.0 - 3e-7, 0.5, 0.0]))
    np.testing.assert_allclose(np.sort(merged.real), [0.0, 0.5, 2.0, 2.0], atol=1e-15)
    untouched = merge_clusters(np.array([1.0, 1.1]))
    np.testing.assert_array_equal(np.sort(untouched.real), [1.0, 1.1])


def test_defective_double_eigenvalue(w0):
    # 2 is a double, defective eigenvalue at this point
    spectrum = eigenvalues_numeric(jacobian(w0, (2.0, 2.0, 2.0, -2 / 3)))
    assert np.sum(np.abs(spectrum - 2.0) <= 1e-8) == 2


@pytest.mark.parametrize("spectrum, tag", [
    ([0.1, -0.5, 0.0, 0.9], Stability.Attracting),
    ([0.1, -0.5, 0.0, 2.0], Stability.Saddle),
    ([0.1, -1.0, 0.0, 2.0], Stability.Nonhyperbolic),
    ([np.exp(0.3j), np.exp(-0.3j), 0.0, 0.2], Stability.Nonhyperbolic),
    ([1.0 + 2e-9, 0.0, 0.0, 0.0], Stability.Saddle),
    ([1.0 + 5e-10, 0.0, 0.0, 0.0], Stability.Nonhyperbolic),
])
def test_stability_from_spectrum(spectrum, tag):
    assert stability_from_spectrum(np.array(spectrum)) is tag


def test_origin_is_attracting(classical):
    cls = classify(classical, np.zeros(4))
    assert cls.tag is Stability.Attracting
    assert cls.witness == (0.0, 0.0, 0.0, 0.0)


def test_classify_records_identity(classical, caplog):
    with caplog.at_level(logging.WARNING):
        cls = classify(classical, (2.0, 0.0, 2.0, 0.0))
    assert cls.identity_nonhyperbolic and cls.consistent
    assert not caplog.records


def test_classify_consistency_on_random_closed_forms(rng):
    for _ in range(300):
        p = random_params(rng)
        for fp in closed_form_fixed_points(p):
            if fp.form is Form.I:
                continue
            cls = classify(p, fp)
            assert cls.consistent
            assert len(cls.witness) == 4


# -- nonhyperbolicity conditions at the closed-form fixed points ------------------

def _engineered(rng, fixed, build, tries=2000):
    out = []
    for _ in range(tries):
        p = build(random_params(rng, **fixed), rng)
        if p is not None:
            out.append(p)
        if len(out) == 200:
            break
    return out


def _form_ii_on_condition(p, rng):
    target = p.a2 * (p.a1 + rng.choice([-1.0, 1.0]) * p.b2)
    c1 = target / p.b4
    return p.replace(c1=c1, c2=1 - c1) if 0 < c1 < 1 else None


def _form_iii_on_condition(p, rng):
    target = p.d1 * (p.d3 + rng.choice([-1.0, 1.0]) * p.b3)
    c2 = target / p.b1
    return p.replace(c2=c2, c1=1 - c2) if 0 < c2 < 1 else None


def test_form_ii_condition_gives_nonhyperbolic(rng):
    cases = _engineered(rng, {}, _form_ii_on_condition)
    assert len(cases) == 200
    for p in cases:
        assert classify(p, (1 / p.a2, 0.0, 1 / p.a1, 0.0)).tag is Stability.Nonhyperbolic


def test_form_iii_condition_gives_nonhyperbolic(rng):
    cases = _engineered(rng, {"d2": 0.0}, _form_iii_on_condition)
    assert len(cases) == 200
    for p in cases:
        assert classify(p, (0.0, 1 / p.d3, 0.0, 1 / p.d1)).tag is Stability.Nonhyperbolic


def test_form_ii_off_condition_is_hyperbolic(rng):
    for _ in range(500):
        p = random_params(rng)
        gap = min(abs(p.b4 * p.c1 - p.a2 * (p.a1 - p.b2)), abs(p.b4 * p.c1 - p.a2 * (p.a1 + p.b2)))
        if gap <= 1e-6:
            continue
        assert classify(p, (1 / p.a2, 0.0, 1 / p.a1, 0.0)).tag is Stability.Saddle


def test_form_iii_off_condition_is_hyperbolic(rng):
    for _ in range(500):
        p = random_params(rng, d2=0.0)
        gap = min(abs(p.b1 * p.c2 - p.d1 * (p.d3 - p.b3)), abs(p.b1 * p.c2 - p.d1 * (p.d3 + p.b3)))
        if gap <= 1e-6:
            continue
        assert classify(p, (0.0, 1 / p.d3, 0.0, 1 / p.d1)).tag is Stability.Saddle


def test_form_iv_off_condition_is_hyperbolic(rng):
    for _ in range(500):
        p = random_params(rng, b1=0.0, b4=0.0)
        if min(abs(p.a1 - p.b2), abs(p.d3 - p.b3)) <= 1e-6:
            continue
        assert classify(p, (0.0, 1 / p.b3, 1 / p.b2, 0.0)).tag is Stability.Saddle


def test_form_ii_factored_identity(rng):
    for _ in range(300):
        p = random_params(rng)
        x, y, u, v = s = (1 / p.a2, 0.0, 1 / p.a1, 0.0)
        coeffs = char_coeffs(p, s)
        factored = (4 - 2 * p.b2 * u - p.b4 * p.c1 * x * u) * (2 - p.a2 * x - p.a1 * u)
        assert abs(coeffs.two_identity - factored) <= 1e-8
        assert abs(coeffs.two_identity) <= 1e-8


spectra = st.lists(
    st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), min_size=4, max_size=4)


@settings(max_examples=300)
@given(values=spectra, data=st.data())
def test_stability_invariant_under_order_and_conjugation(values, data):
    spectrum = np.array(values)
    perm = data.draw(st.permutations(range(4)))
    assert stability_from_spectrum(spectrum) is stability_from_spectrum(spectrum[list(perm)])
    assert stability_from_spectrum(spectrum) is stability_from_spectrum(np.conj(spectrum))
