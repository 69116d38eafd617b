"""Jacobian, characteristic polynomial and stability class of the hemophilia operator.

At a state ``s`` the characteristic polynomial of the Jacobian is written
``lambda^4 - p1 lambda^3 + p2 lambda^2 + p3 lambda`` (the constant term,
``det J``, vanishes identically). At a nonzero fixed point ``lambda = 2`` is
a root as well, which leaves the quadratic factor

    lambda^2 + (2 - p1) lambda + (p2 + 4 - 2 p1)

whose roots are ``-1 + (p1 +- sqrt(p1^2 + 4 p1 - 4 p2 - 12)) / 2``.
"""
from __future__ import annotations

import cmath
import enum
import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import IdentityViolated, NotAFixedPoint
from .operator import HemophiliaParams, residual

log = logging.getLogger(__name__)

FIXED_POINT_TOL = 1e-10
IDENTITY_TOL = 1e-8
HYPERBOLIC_TOL = 1e-9


def jacobian(params: HemophiliaParams, s) -> np.ndarray:
    """Matrix of partial derivatives of the operator at ``s``."""
    a1, a2, c1, c2 = params.a1, params.a2, params.c1, params.c2
    b1, b2, b3, b4 = params.b1, params.b2, params.b3, params.b4
    d1, d2, d3 = params.d1, params.d2, params.d3
    x, y, u, v = (float(c) for c in s)
    return np.array([
        [a1 * u, b1 * u, a1 * x + b1 * y, 0.0],
        [c1 * v, b2 * u + d1 * v, b2 * y, c1 * x + d1 * y],
        [a2 * u + c2 * v, b3 * u + d2 * v, a2 * x + b3 * y, c2 * x + d2 * y],
        [0.0, b4 * u + d3 * v, b4 * y, d3 * y],
    ])


@dataclass(frozen=True)
class CharCoeffs:
    p1: float
    p2: float
    p3: float

    @property
    def two_identity(self) -> float:
        """``8 - 4 p1 + 2 p2 + p3``; zero exactly when 2 is a root."""
        return 8.0 - 4.0 * self.p1 + 2.0 * self.p2 + self.p3


def _p_polynomials(params: HemophiliaParams, s) -> CharCoeffs:
    a1, a2, c1, c2 = params.a1, params.a2, params.c1, params.c2
    b1, b2, b3, b4 = params.b1, params.b2, params.b3, params.b4
    d1, d2, d3 = params.d1, params.d2, params.d3
    x, y, u, v = (float(c) for c in s)
    p1 = a2 * x + (b3 + d3) * y + (a1 + b2) * u + d1 * v
    p2 = ((a1 * b3 + a1 * d3 + b2 * d3 - b4 * d1 - a2 * b1) * y * u
          + a1 * b2 * u ** 2
          + (a1 * d1 - b1 * c1) * u * v
          + (b3 * d3 - b4 * d2) * y ** 2
          + (a2 * d3 - b4 * c2) * x * y
          + (a2 * b2 - b4 * c1) * x * u
          + (a2 * d1 - c1 * d3 - a1 * c2) * x * v
          + (b3 * d1 - b2 * d2 - b1 * c2) * y * v)
    # Mixes degree-2 and degree-3 terms: equals the true coefficient only on
    # the fixed-point set, hence the residual check in char_coeffs.
    p3 = (a2 * d3 * x * y
          + b4 * c1 * x * u
          + (2 * a2 * d1 + c1 * d3 - b3 * c1 + a1 * c2 - b2 * c2) * x * v
          + (a1 * b4 * d2 - a1 * b3 * d3) * y ** 2 * u
          + (a1 * b4 * d1 - a1 * b2 * d3 - b1 * b4 * c1) * y * u ** 2
          + (a1 * b2 * d2 - a1 * b3 * d1 + b1 * b3 * c1) * y * u * v
          + (a2 * b1 * c1 + a1 * b2 * c2 - a1 * a2 * d1) * x * u * v
          + (b2 * b4 * c2 - a2 * b2 * d3 - a1 * a2 * d3) * x * y * u
          + (b4 * c2 * d1 - b4 * c1 * d2 + b3 * c1 * d3 - a2 * d1 * d3) * x * y * v
          + a2 * c1 * x ** 2 * (b4 * u + d3 * v)
          + (c2 * d1 - c1 * d2) * v ** 2 * (a1 * x + b1 * y)
          + b1 * c2 * d3 * y ** 2 * v)
    return CharCoeffs(p1, p2, p3)


def char_coeffs(params: HemophiliaParams, s, tol: float = FIXED_POINT_TOL) -> CharCoeffs:
    """Closed-form ``p1, p2, p3`` at a fixed point ``s``.

    Raises :class:`NotAFixedPoint` if ``residual(params, s) > tol``.
    """
    r = residual(params, s)
    if r > tol:
        raise NotAFixedPoint(r, tol)
    return _p_polynomials(params, s)


def numeric_char_coeffs(j: np.ndarray) -> tuple[CharCoeffs, float]:
    """``(p1, p2, p3)`` and the constant term from the numerically expanded
    characteristic polynomial of ``j``.

    The constant term is ``det(j)`` computed by LU factorization.
    """
    c = np.poly(j)  # det(lambda I - J) = l^4 + c1 l^3 + c2 l^2 + c3 l + c4
    return CharCoeffs(-c[1], c[2], c[3]), float(np.linalg.det(j))


def _sorted_spectrum(values) -> np.ndarray:
    values = np.asarray(values, dtype=complex)
    # tiny imaginary parts from the eigensolver would otherwise break ordering
    values = np.where(np.abs(values.imag) < 1e-14, values.real + 0j, values)
    order = np.lexsort((values.imag, values.real))
    return values[order]


def eigenvalues_closed_form(coeffs: CharCoeffs, tol: float = IDENTITY_TOL) -> np.ndarray:
    """Spectrum ``{0, 2, lambda3, lambda4}`` at a nonzero fixed point.

    Raises :class:`IdentityViolated` if 2 is not a root of the
    characteristic polynomial described by ``coeffs``.
    """
    if abs(coeffs.two_identity) > tol:
        raise IdentityViolated(coeffs.two_identity, tol)
    p1, p2 = coeffs.p1, coeffs.p2
    root = cmath.sqrt(p1 * p1 + 4.0 * p1 - 4.0 * p2 - 12.0)
    lam3 = -1.0 + (p1 + root) / 2.0
    lam4 = -1.0 + (p1 - root) / 2.0
    return _sorted_spectrum([0.0, 2.0, lam3, lam4])


CLUSTER_RADIUS = 1e-6


def merge_clusters(values, radius: float = CLUSTER_RADIUS) -> np.ndarray:
    """Replace each group of eigenvalues closer than ``radius`` by the group mean.

    A defective eigenvalue of multiplicity ``m`` comes back from a dense
    solver split by about ``eps**(1/m)``; the mean of the split group is
    accurate to about ``eps``.
    """
    values = np.asarray(values, dtype=complex)
    n = len(values)
    label = list(range(n))

    def root(i):
        while label[i] != i:
            i = label[i]
        return i

    for i in range(n):
        for k in range(i + 1, n):
            if abs(values[i] - values[k]) < radius:
                label[root(k)] = root(i)
    out = values.copy()
    for r in set(root(i) for i in range(n)):
        members = [i for i in range(n) if root(i) == r]
        out[members] = values[members].mean()
    return out


def eigenvalues_numeric(j, cluster_radius: float | None = CLUSTER_RADIUS) -> np.ndarray:
    """Eigenvalues of a square matrix from a dense solver, sorted by (re, im).

    Near-coincident eigenvalues are merged with :func:`merge_clusters`
    unless ``cluster_radius`` is None.
    """
    values = np.linalg.eigvals(np.asarray(j, dtype=float))
    if cluster_radius is not None:
        values = merge_clusters(values, cluster_radius)
    return _sorted_spectrum(values)


def contains(spectrum, value, tol: float) -> bool:
    return bool(np.min(np.abs(np.asarray(spectrum) - value)) <= tol)


class Stability(enum.Enum):
    Attracting = "Attracting"
    Saddle = "Saddle"
    Nonhyperbolic = "Nonhyperbolic"


@dataclass(frozen=True, eq=False)
class StabilityClass:
    """Stability tag plus the eigenvalue moduli that decided it.

    ``identity_nonhyperbolic`` records whether ``p1 - p2 = 3`` or
    ``3 p1 - p2 = 7`` held; ``consistent`` is False when that disagrees with
    the modulus test (possible for unit-modulus complex pairs).
    """

    tag: Stability
    witness: tuple
    spectrum: np.ndarray
    identity_nonhyperbolic: bool | None = None
    consistent: bool = True

    def __str__(self):
        return self.tag.value


def stability_from_spectrum(spectrum, tol: float = HYPERBOLIC_TOL) -> Stability:
    moduli = np.abs(np.asarray(spectrum))
    if np.any(np.abs(moduli - 1.0) <= tol):
        return Stability.Nonhyperbolic
    if np.all(moduli < 1.0 - tol):
        return Stability.Attracting
    return Stability.Saddle


def classify(params: HemophiliaParams, s, tol: float = HYPERBOLIC_TOL,
             fixed_tol: float = FIXED_POINT_TOL) -> StabilityClass:
    """Stability class of the fixed point ``s``.

    The numeric spectrum decides; the ``p``-identities are evaluated
    alongside and any disagreement is logged and recorded.
    """
    s = np.asarray(getattr(s, "state", s), dtype=float)
    coeffs = char_coeffs(params, s, tol=fixed_tol)
    spectrum = eigenvalues_numeric(jacobian(params, s))
    moduli = tuple(float(m) for m in np.abs(spectrum))
    if not np.any(s):
        return StabilityClass(Stability.Attracting, moduli, spectrum)
    identity = (abs(coeffs.p1 - coeffs.p2 - 3.0) <= tol
                or abs(3.0 * coeffs.p1 - coeffs.p2 - 7.0) <= tol)
    tag = stability_from_spectrum(spectrum, tol)
    consistent = identity == (tag is Stability.Nonhyperbolic)
    if not consistent:
        log.warning("p-identities (%s) disagree with modulus test (%s) at %s",
                    identity, tag.value, s)
    return StabilityClass(tag, moduli, spectrum, identity, consistent)
