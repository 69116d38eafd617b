"""Region membership, limit prediction and simulation of trajectories.

Sets used throughout (all in R^4 unless noted):

    O      x = y = 0  or  u = v = 0            W(O) = {0}
    I      y = v = 0
    J      y = v = 0 and x = u
    P      all coordinates >= 0
    P0     t in P with (x + y)(u + v) < 4
    Q_a    t in P with x + y + u + v <= a      W(Q_a) in Q_{a^2/4}
    N      all coordinates <= 0                W(N) in P
    N0     x, y <= 0 and u, v >= 0             W(N0) in N
    N1     x, y >= 0 and u, v <= 0             W(N1) in N
    Delta  t in P with x + y + u + v > 4
    Delta0 t in Delta with max(a1 a2 x u, b2 b3 y u, d1 d3 y v) > 1

Trajectories starting in P0 (or eventually entering it) go to the origin;
those in Delta0 blow up doubly exponentially.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    NegativeCoordinate,
    NotOnSupportedSubspace,
    ParameterConditionViolated,
    StateOverflow,
)
from .operator import GeneralOperator, HemophiliaParams, Termination, apply, iterate

BOUNDARY_TOL = 1e-12
POINT_TOL = 1e-13


# -- regions -----------------------------------------------------------------

@dataclass(frozen=True)
class Region:
    """Set memberships of a state. ``q_level`` is the smallest ``a`` with ``t`` in ``Q_a``."""

    flags: frozenset
    q_level: float | None = None

    def __contains__(self, flag):
        return flag in self.flags

    def __str__(self):
        names = sorted(self.flags)
        if self.q_level is not None:
            names.append(f"Q({self.q_level:.6g})")
        return "{" + ", ".join(names) + "}"


def reproduction_max(params: HemophiliaParams, t) -> float:
    """``max(a1 a2 x u, b2 b3 y u, d1 d3 y v)``."""
    x, y, u, v = (float(c) for c in t)
    p = params
    return max(p.a1 * p.a2 * x * u, p.b2 * p.b3 * y * u, p.d1 * p.d3 * y * v)


def classify_region(t, params: HemophiliaParams | None = None) -> Region:
    """Every set from the module docstring that contains ``t``.

    ``Delta0`` needs the parameters and is only tested when they are given.
    The flag ``None`` is set when no other flag applies.
    """
    x, y, u, v = (float(c) for c in t)
    flags = set()
    if (x == 0 and y == 0) or (u == 0 and v == 0):
        flags.add("O")
    if y == 0 and v == 0:
        flags.add("I")
        if x == u:
            flags.add("J")
    q_level = None
    if min(x, y, u, v) >= 0:
        flags.add("P")
        total = x + y + u + v
        if (x + y) * (u + v) < 4.0:
            flags.add("P0")
        if total <= 4.0:
            q_level = total
        else:
            flags.add("Delta")
            if params is not None and reproduction_max(params, t) > 1.0:
                flags.add("Delta0")
    if max(x, y, u, v) <= 0:
        flags.add("N")
    if x <= 0 and y <= 0 and u >= 0 and v >= 0:
        flags.add("N0")
    if x >= 0 and y >= 0 and u <= 0 and v <= 0:
        flags.add("N1")
    if not flags:
        flags.add("None")
    return Region(frozenset(flags), q_level)


def balance_expression(params: HemophiliaParams, t) -> float:
    """``(a1 - 1/2) x u + (c1 - 1/2) x v + (b1 + b2 - 1/2) y u + (d1 - 1/2) y v``.

    On the boundary ``x + y = u + v = 2`` of ``Q_4`` this is the amount by
    which the female mass of the next generation exceeds 2.
    """
    x, y, u, v = (float(c) for c in t)
    p = params
    return ((p.a1 - 0.5) * x * u + (p.c1 - 0.5) * x * v
            + (p.b1 + p.b2 - 0.5) * y * u + (p.d1 - 0.5) * y * v)


# -- predictions -------------------------------------------------------------

class Outcome(enum.Enum):
    ConvergesToOrigin = "ConvergesToOrigin"
    Diverges = "Diverges"
    ConvergesToPoint = "ConvergesToPoint"
    Unknown = "Unknown"


@dataclass(frozen=True, eq=False)
class LimitPrediction:
    """Predicted limit and the result that justifies it.

    ``theorem_backed`` is False only for divergence inferred from a numeric
    overflow during the bounded iterate searches.
    """

    outcome: Outcome
    justification: str = ""
    limit: np.ndarray | None = None
    theorem_backed: bool = True

    def __str__(self):
        if self.outcome is Outcome.ConvergesToPoint:
            coords = ", ".join(f"{c:.6g}" for c in self.limit)
            return f"{self.outcome.value}(({coords})) [{self.justification}]"
        return f"{self.outcome.value} [{self.justification}]"


UNKNOWN = LimitPrediction(Outcome.Unknown, "none")


@dataclass(frozen=True)
class PredictorConfig:
    k_max: int = 50
    tol: float = BOUNDARY_TOL

    def __post_init__(self):
        if self.k_max < 0:
            raise ValueError("k_max must be nonnegative")


def _nonneg(t):
    return min(float(c) for c in t) >= 0


def _in_p0(t, tol):
    x, y, u, v = (float(c) for c in t)
    return _nonneg(t) and (x + y) * (u + v) < 4.0 - tol


def _predict_in_p(params, t, cfg):
    """Rules 1-3 of :func:`predict_limit` for ``t`` in P, with bounded iterate searches."""
    tol = cfg.tol
    if _in_p0(t, tol):
        return LimitPrediction(Outcome.ConvergesToOrigin, "Prop1")
    total = float(np.sum(t))
    if total <= 4.0 + tol:
        # (x + y)(u + v) = 4 on Q_4: the orbit stays on that boundary until the
        # female/male balance tips, after which it lies in some Q_delta, delta < 4
        s = np.asarray(t, dtype=float)
        for k in range(cfg.k_max + 1):
            if abs(balance_expression(params, s)) > tol:
                return LimitPrediction(Outcome.ConvergesToOrigin, f"Lemma3(k={k})")
            if k < cfg.k_max:
                s = apply(params, s)
        return None
    s = np.asarray(t, dtype=float)
    for k in range(cfg.k_max + 1):
        x, y, u, v = (float(c) for c in s)
        if (x + y) * (u + v) < 4.0 - tol:
            return LimitPrediction(Outcome.ConvergesToOrigin, f"Lemma4(i)(k={k})")
        if reproduction_max(params, s) > 1.0 + tol:
            label = "Lemma4(ii)" if k == 0 else f"Lemma4(ii)(k={k})"
            return LimitPrediction(Outcome.Diverges, label)
        if k < cfg.k_max:
            try:
                s = apply(params, s)
            except StateOverflow:
                return LimitPrediction(Outcome.Diverges, f"overflow(k={k + 1})",
                                       theorem_backed=False)
    return None


def _decided_after(params, t, steps, branch, cfg):
    s = np.asarray(t, dtype=float)
    try:
        for _ in range(steps):
            s = apply(params, s)
    except StateOverflow:
        return LimitPrediction(Outcome.Diverges, f"overflow({branch})", theorem_backed=False)
    inner = _predict_in_p(params, s, cfg)
    if inner is None:
        return None
    return LimitPrediction(inner.outcome, f"Theorem1({branch})+{inner.justification}",
                           inner.limit, inner.theorem_backed)


def predict_limit(params: HemophiliaParams, t, cfg: PredictorConfig = PredictorConfig()) -> LimitPrediction:
    """Predict the limit of ``W^n(t)`` from the proven convergence/divergence criteria.

    The first criterion that applies is reported:

    1. ``t`` in P0: converges to the origin.
    2. ``t`` in Q_4 and the balance expression of :func:`balance_expression`
       is nonzero at some iterate ``k <= k_max``: converges to the origin.
    3. ``t`` in Delta and some iterate ``k <= k_max`` has
       ``(x + y)(u + v) < 4``: converges to the origin; if instead some
       iterate has ``max(a1 a2 x u, b2 b3 y u, d1 d3 y v) > 1`` it diverges.
    4. ``t`` in N (resp. N0, N1): rules 1-3 applied to ``W(t)`` (resp. ``W^2(t)``),
       which lies in P.
    5. ``t`` in O, or on a coordinate subspace with a closed-form orbit
       (see :func:`closed_form_axis_trajectory`).

    Otherwise the outcome is ``Unknown``.
    """
    t = np.asarray(t, dtype=float)
    if _nonneg(t):
        found = _predict_in_p(params, t, cfg)
        if found is not None:
            return found
    region = classify_region(t)
    if "N" in region and "O" not in region:
        found = _decided_after(params, t, 1, "N", cfg)
        if found is not None:
            return found
    for name in ("N0", "N1"):
        if name in region and "O" not in region:
            found = _decided_after(params, t, 2, name, cfg)
            if found is not None:
                return found
    if "O" in region:
        return LimitPrediction(Outcome.ConvergesToOrigin, "W(O)={0}")
    try:
        _, pred = closed_form_axis_trajectory(params, t, 0, tol=cfg.tol)
        return pred
    except (NotOnSupportedSubspace, ParameterConditionViolated):
        pass
    return UNKNOWN


def self_reproduction_max(op: GeneralOperator, t) -> float:
    """``max_{i,l} pf[i, l, i] * pm[i, l, l] * x_i * y_l`` over self-reproducing crosses."""
    x, y = op.split(t)
    i = np.arange(op.eta)[:, None]
    l = np.arange(op.nu)[None, :]
    weight = op.pf[i, l, i] * op.pm[i, l, l]
    return float(np.max(weight * np.outer(x, y)))


def predict_limit_general(op: GeneralOperator, t, tol: float = BOUNDARY_TOL) -> LimitPrediction:
    """Limit prediction for a general operator and a nonnegative state.

    Total mass below 4 gives convergence to the origin; a self-reproducing
    cross ``(i, l)`` with ``pf[i,l,i] pm[i,l,l] x_i y_l > 1`` gives divergence.
    """
    t = np.asarray(t, dtype=float)
    op.split(t)
    if np.any(t < 0):
        raise NegativeCoordinate("the general criteria need a nonnegative state")
    if float(np.sum(t)) < 4.0 - tol:
        return LimitPrediction(Outcome.ConvergesToOrigin, "Prop1")
    if self_reproduction_max(op, t) > 1.0 + tol:
        return LimitPrediction(Outcome.Diverges, "Prop2")
    return UNKNOWN


# -- closed-form orbits on coordinate subspaces ------------------------------

def _axis_family(params, t, tol):
    """Identify the invariant coordinate plane of ``t`` and its parameters.

    Returns ``(indices, coef_first, coef_second)`` where the orbit on the
    plane spanned by ``indices`` is ``(first, second) -> (c1 * prod, c2 * prod)``.
    """
    x, y, u, v = (float(c) for c in t)
    p = params
    if y == 0 and v == 0:
        return (0, 2), p.a1, p.a2, "a1*a2*x*u"
    if x == 0 and u == 0:
        if abs(p.d2) > tol:
            raise ParameterConditionViolated("(0, y, 0, v) is only invariant when d2 = 0")
        return (1, 3), p.d1, p.d3, "d1*d3*y*v"
    if x == 0 and v == 0:
        if abs(p.b1) > tol or abs(p.b4) > tol:
            raise ParameterConditionViolated("(0, y, u, 0) is only invariant when b1 = b4 = 0")
        return (1, 2), p.b2, p.b3, "b2*b3*y*u"
    raise NotOnSupportedSubspace(f"{t} is not of the form (x,0,u,0), (0,y,0,v) or (0,y,u,0)")


def closed_form_axis_trajectory(params: HemophiliaParams, t0, n: int,
                                tol: float = BOUNDARY_TOL):
    """``W^n(t0)`` and the limit for ``t0`` on an invariant coordinate plane.

    On ``(x, 0, u, 0)`` the orbit is
    ``(m^(2^(n-1)) / a2, 0, m^(2^(n-1)) / a1, 0)`` with ``m = a1 a2 x0 u0``,
    and analogously on ``(0, y, 0, v)`` (needs ``d2 = 0``, product ``d1 d3``)
    and ``(0, y, u, 0)`` (needs ``b1 = b4 = 0``, product ``b2 b3``). When one
    of the two coefficients is zero the orbit is at the origin from ``n = 2``.
    The limit is the origin for ``|m| < 1``, the nonzero fixed point on the
    plane for ``|m| = 1`` and infinity for ``|m| > 1``.

    Returns ``(state, LimitPrediction)``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    t0 = np.asarray(t0, dtype=float)
    (i, j), ci, cj, label = _axis_family(params, t0, tol)
    prod = float(t0[i] * t0[j])
    m = ci * cj * prod
    state = np.zeros(4)
    if n == 0:
        state[:] = t0
    elif ci == 0 or cj == 0:
        if n == 1:
            state[i], state[j] = ci * prod, cj * prod
    else:
        try:
            power = m ** (2 ** (n - 1))
        except OverflowError:
            power = float("inf")
        state[i], state[j] = power / cj, power / ci
    justification = f"AxisClosedForm({label})"
    if ci == 0 or cj == 0 or abs(m) < 1.0 - tol:
        pred = LimitPrediction(Outcome.ConvergesToOrigin, justification)
    elif abs(m) <= 1.0 + tol:
        limit = np.zeros(4)
        limit[i], limit[j] = 1.0 / cj, 1.0 / ci
        pred = LimitPrediction(Outcome.ConvergesToPoint, justification, limit)
    else:
        pred = LimitPrediction(Outcome.Diverges, justification)
    return state, pred


# -- simulation ----------------------------------------------------------------

class Empirical(enum.Enum):
    Origin = "Origin"
    Point = "Point"
    Blowup = "Blowup"
    Undecided = "Undecided"


@dataclass(frozen=True, eq=False)
class SimulationResult:
    outcome: Empirical
    steps: int
    final: np.ndarray = field(repr=False)

    @property
    def point(self):
        return self.final if self.outcome is Empirical.Point else None


_TERMINATION_TO_EMPIRICAL = {
    Termination.ConvergedToOrigin: Empirical.Origin,
    Termination.ConvergedToPoint: Empirical.Point,
    Termination.Overflowed: Empirical.Blowup,
    Termination.CapReached: Empirical.Undecided,
}


def simulate_until(op, t, n: int = 200, max_norm: float = 1e12,
                   origin_tol: float = 1e-12, point_tol: float = POINT_TOL) -> SimulationResult:
    """Iterate until the orbit reaches the origin, settles, blows up, or ``n`` steps pass."""
    traj = iterate(op, t, n=n, max_norm=max_norm, origin_tol=origin_tol, point_tol=point_tol)
    return SimulationResult(_TERMINATION_TO_EMPIRICAL[traj.termination], traj.steps, traj.final)


def agrees(prediction: LimitPrediction, sim: SimulationResult, point_tol: float = 1e-6) -> bool | None:
    """Whether a prediction matches a simulation; None when either is undecided."""
    if prediction.outcome is Outcome.Unknown or sim.outcome is Empirical.Undecided:
        return None
    if prediction.outcome is Outcome.ConvergesToOrigin:
        return sim.outcome is Empirical.Origin
    if prediction.outcome is Outcome.Diverges:
        return sim.outcome is Empirical.Blowup
    return (sim.outcome is Empirical.Point
            and float(np.max(np.abs(sim.final - prediction.limit))) <= point_tol)
