"""Fixed points of the hemophilia operator.

A fixed point has one of five supports:

    I    (0, 0, 0, 0)
    II   (x, 0, u, 0)
    III  (0, y, 0, v)
    IV   (0, y, u, 0)
    V    (x, y, u, v) with xyuv != 0

Forms II-IV are unique and known in closed form; form V is searched for
numerically with damped Newton iterations from a grid of seeds.
"""
from __future__ import annotations

import enum
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exceptions import NoConvergence, SingularJacobianAtSeed
from .operator import HemophiliaParams, _step, residual  # noqa: F401  (re-export)
from .spectral import FIXED_POINT_TOL, jacobian

log = logging.getLogger(__name__)

ZERO_TOL = 1e-10
EXISTENCE_TOL = 1e-12
DEDUP_DIST = 1e-6
BOUNDARY_SNAP = 1e-4


class Form(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"


def form_of(s, tol: float = ZERO_TOL) -> Form | None:
    """Support pattern of ``s``; None if it matches no fixed-point form."""
    nz = tuple(abs(float(c)) > tol for c in s)
    return {
        (False, False, False, False): Form.I,
        (True, False, True, False): Form.II,
        (False, True, False, True): Form.III,
        (False, True, True, False): Form.IV,
        (True, True, True, True): Form.V,
    }.get(nz)


@dataclass(eq=False)
class FixedPoint:
    state: np.ndarray
    form: Form
    residual: float
    spectrum: np.ndarray | None = None
    stability: object | None = field(default=None)

    def __repr__(self):
        coords = ", ".join(f"{c:.6g}" for c in self.state)
        return f"FixedPoint({self.form.value}: ({coords}), residual={self.residual:.2e})"


def _make(params, state, form):
    state = np.asarray(state, dtype=float)
    return FixedPoint(state, form, residual(params, state))


def _in_open_unit(value, tol=EXISTENCE_TOL):
    return tol < value < 1.0 - tol


def _is_zero(value, tol=EXISTENCE_TOL):
    return abs(value) <= tol


def form_ii_exists(p: HemophiliaParams) -> bool:
    return _in_open_unit(p.a1) and _in_open_unit(p.a2)


def form_iii_exists(p: HemophiliaParams) -> bool:
    return _is_zero(p.d2) and _in_open_unit(p.d1) and _in_open_unit(p.d3)


def form_iv_exists(p: HemophiliaParams) -> bool:
    return (_is_zero(p.b1) and _is_zero(p.b4)
            and _in_open_unit(p.b2) and _in_open_unit(p.b3))


def closed_form_fixed_points(params: HemophiliaParams) -> list[FixedPoint]:
    """The origin together with whichever of forms II, III, IV exist."""
    p = params
    out = [_make(p, np.zeros(4), Form.I)]
    if form_ii_exists(p):
        out.append(_make(p, (1 / p.a2, 0.0, 1 / p.a1, 0.0), Form.II))
    if form_iii_exists(p):
        out.append(_make(p, (0.0, 1 / p.d3, 0.0, 1 / p.d1), Form.III))
    if form_iv_exists(p):
        out.append(_make(p, (0.0, 1 / p.b3, 1 / p.b2, 0.0), Form.IV))
    return out


# -- Newton search -----------------------------------------------------------

def damped_newton(f, jac, seed, tol: float = 1e-12, max_iter: int = 100,
                  max_halvings: int = 20, cond_limit: float = 1e14) -> np.ndarray:
    """Solve ``f(s) = 0`` from ``seed`` by Newton steps with step halving.

    Each step is the least-squares solution of ``jac(s) d = -f(s)``; it is
    halved up to ``max_halvings`` times until the max-norm of ``f``
    decreases. Raises :class:`SingularJacobianAtSeed` if the Jacobian at the
    seed has condition number above ``cond_limit`` and the seed is not
    already a root, :class:`NoConvergence` otherwise.
    """
    s = np.array(seed, dtype=float)
    r = f(s)
    norm = np.max(np.abs(r))
    if norm <= tol:
        return s
    if np.linalg.cond(jac(s)) > cond_limit:
        raise SingularJacobianAtSeed(f"singular Jacobian at seed {seed}")
    for _ in range(max_iter):
        step = np.linalg.lstsq(jac(s), -r, rcond=None)[0]
        scale = 1.0
        for _ in range(max_halvings + 1):
            trial = s + scale * step
            with np.errstate(over="ignore", invalid="ignore"):
                r_trial = f(trial)
            n_trial = np.max(np.abs(r_trial))
            if np.isfinite(n_trial) and n_trial < norm:
                break
            scale *= 0.5
        else:
            raise NoConvergence(f"no decrease along Newton direction from seed {seed}")
        s, r, norm = trial, r_trial, n_trial
        if norm <= tol:
            return _polish(f, jac, s, norm)
    raise NoConvergence(f"residual {norm:.2e} after {max_iter} iterations from seed {seed}")


def _polish(f, jac, s, norm, steps: int = 8):
    # a few full steps beyond tol, kept only while the residual keeps falling
    for _ in range(steps):
        trial = s + np.linalg.lstsq(jac(s), -f(s), rcond=None)[0]
        n_trial = np.max(np.abs(f(trial)))
        if not n_trial < norm:
            break
        s, norm = trial, n_trial
    return s


def default_seeds(params: HemophiliaParams | None = None, points: int = 5,
                  low: float = -3.0, high: float = 3.0) -> np.ndarray:
    """Regular grid of ``points**4`` seeds on ``[low, high]^4`` plus known roots."""
    axis = np.linspace(low, high, points)
    grid = np.array(list(itertools.product(axis, repeat=4)))
    extra = [(1.0, 2.0, 2.0, -0.5), (2.0, 2.0, 2.0, -2.0 / 3.0)]
    if params is not None:
        extra += [fp.state for fp in closed_form_fixed_points(params)[1:]]
    return np.vstack([grid, np.array(extra, dtype=float)])


def _solve_seed(params, seed, tol, max_iter):
    def f(s):
        return _image(params, s) - s

    def jac(s):
        return jacobian(params, s) - np.eye(4)

    try:
        return damped_newton(f, jac, seed, tol=tol, max_iter=max_iter)
    except (SingularJacobianAtSeed, NoConvergence) as exc:
        log.debug("seed %s skipped: %s", seed, exc)
        return None


def _image(params, s):
    with np.errstate(over="ignore", invalid="ignore"):
        return np.array(_step(params, *s))


def _near_boundary_root(root, snap: float = BOUNDARY_SNAP) -> bool:
    """True if some coordinate of ``root`` is within ``snap`` (relative) of zero.

    Near a fixed point where ``J - I`` is singular, Newton converges only
    linearly and stalls about ``sqrt(tol)`` away from it. Roots that close
    to a coordinate plane cannot be told apart from boundary fixed points,
    so they are not reported as interior.
    """
    scale = max(1.0, float(np.max(np.abs(root))))
    return bool(np.min(np.abs(root)) < snap * scale)


def dedupe(points, dist: float = DEDUP_DIST) -> list[np.ndarray]:
    """Sort lexicographically, then drop points within ``dist`` (max-norm) of a kept one."""
    ordered = sorted((np.asarray(p, dtype=float) for p in points), key=tuple)
    kept: list[np.ndarray] = []
    for p in ordered:
        if all(np.max(np.abs(p - q)) > dist for q in kept):
            kept.append(p)
    return kept


def solve_interior_fixed_points(params: HemophiliaParams, seeds=None, tol: float = 1e-12,
                                max_iter: int = 100, workers: int | None = None) -> list[FixedPoint]:
    """Form V fixed points reachable by damped Newton from ``seeds``.

    ``seeds`` defaults to :func:`default_seeds`. The result is deduplicated,
    sorted, and contains only roots with residual at most ``1e-10`` and all
    four coordinates nonzero. It is not guaranteed to be exhaustive.
    """
    if seeds is None:
        seeds = default_seeds(params)
    seeds = np.asarray(seeds, dtype=float).reshape(-1, 4)
    if len(seeds) == 0:
        return []
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            roots = list(pool.map(lambda s: _solve_seed(params, s, tol, max_iter), seeds))
    else:
        roots = [_solve_seed(params, s, tol, max_iter) for s in seeds]
    found = []
    for root in dedupe(r for r in roots if r is not None):
        if form_of(root) is not Form.V or _near_boundary_root(root):
            continue
        fp = _make(params, root, Form.V)
        if fp.residual <= FIXED_POINT_TOL:
            found.append(fp)
    return found


def all_fixed_points(params: HemophiliaParams, search: bool = True, **kwargs) -> list[FixedPoint]:
    """Closed-form fixed points followed by any interior ones found by search."""
    out = closed_form_fixed_points(params)
    if search:
        out += solve_interior_fixed_points(params, **kwargs)
    return out
