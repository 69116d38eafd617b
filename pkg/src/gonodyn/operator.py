"""Gonosomal evolution operators and their trajectories.

Two operators are provided:

* the four-genotype hemophilia operator on ``t = (x, y, u, v)`` with
  genotypes XX, XX^h (females) and XY, X^hY (males),

      x' = a1 x u + b1 y u
      y' = c1 x v + b2 y u + d1 y v
      u' = a2 x u + c2 x v + b3 y u + d2 y v
      v' = b4 y u + d3 y v

* the general bilinear operator with ``eta`` female and ``nu`` male types,
  ``x'_j = sum_{i,r} pf[i, r, j] x_i y_r`` and
  ``y'_l = sum_{i,r} pm[i, r, l] x_i y_r``.

States are plain float arrays. For the general operator the female block
comes first: ``t = (x_1..x_eta, y_1..y_nu)``.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .exceptions import (
    DimensionMismatch,
    NegativeCoefficient,
    NormalizationViolation,
    ParameterError,
    StateOverflow,
)

NORM_TOL = 1e-12

PARAM_NAMES = ("a1", "a2", "c1", "c2", "b1", "b2", "b3", "b4", "d1", "d2", "d3")
GROUPS = {
    "a": ("a1", "a2"),
    "c": ("c1", "c2"),
    "b": ("b1", "b2", "b3", "b4"),
    "d": ("d1", "d2", "d3"),
}


@dataclass(frozen=True)
class HemophiliaParams:
    """Inheritance coefficients of the four crosses.

    ``XX x XY -> a1 XX, a2 XY``; ``XX x X^hY -> c1 XX^h, c2 XY``;
    ``XX^h x XY -> b1 XX, b2 XX^h, b3 XY, b4 X^hY``;
    ``XX^h x X^hY -> d1 XX^h, d2 XY, d3 X^hY``.

    Construction validates the coefficients (see :func:`validate_hemophilia`).
    """

    a1: float
    a2: float
    c1: float
    c2: float
    b1: float
    b2: float
    b3: float
    b4: float
    d1: float
    d2: float
    d3: float

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, float(getattr(self, f.name)))
        validate_hemophilia(self)

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def replace(self, **changes) -> "HemophiliaParams":
        d = self.as_dict()
        d.update(changes)
        return HemophiliaParams(**d)


def validate_hemophilia(params, tol: float = NORM_TOL) -> None:
    """Raise if ``params`` violates nonnegativity or a group normalization.

    Works on anything with the eleven coefficient attributes or keys.
    """
    get = params.__getitem__ if isinstance(params, dict) else lambda k: getattr(params, k)
    for name in PARAM_NAMES:
        value = get(name)
        if not math.isfinite(value):
            raise ParameterError(f"coefficient {name} = {value!r} is not finite")
        if value < 0:
            raise NegativeCoefficient(name, value)
    for group, names in GROUPS.items():
        residual = math.fsum(get(n) for n in names) - 1.0
        if abs(residual) > tol:
            raise NormalizationViolation(group, residual)


PRESETS = {
    "classical": dict(a1=0.5, a2=0.5, c1=0.5, c2=0.5,
                      b1=0.25, b2=0.25, b3=0.25, b4=0.25,
                      d1=1 / 3, d2=1 / 3, d3=1 / 3),
    "w0": dict(a1=0.5, a2=0.5, c1=0.0, c2=1.0,
               b1=0.0, b2=0.5, b3=0.5, b4=0.0,
               d1=0.0, d2=0.5, d3=0.5),
}


def preset(name: str) -> HemophiliaParams:
    """Return a built-in parameter set (``"classical"`` or ``"w0"``)."""
    try:
        return HemophiliaParams(**PRESETS[name.lower()])
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def random_params(rng: np.random.Generator, **fixed) -> HemophiliaParams:
    """Draw each coefficient group uniformly from its simplex.

    Keyword arguments pin individual coefficients to zero (``b1=0``) or to a
    value; the remaining members of the group share ``1 - pinned`` sum.
    """
    values = {}
    for names in GROUPS.values():
        free = [n for n in names if n not in fixed]
        budget = 1.0 - sum(fixed.get(n, 0.0) for n in names)
        draw = rng.dirichlet(np.ones(len(free))) * budget if free else []
        values.update(dict(zip(free, draw)))
        values.update({n: fixed[n] for n in names if n in fixed})
    return HemophiliaParams(**values)


@dataclass(frozen=True, eq=False)
class GeneralOperator:
    """Bilinear operator with coefficient tensors ``pf[i, r, j]`` and ``pm[i, r, l]``.

    ``i`` indexes female parents, ``r`` male parents, ``j`` female offspring and
    ``l`` male offspring. Each cross ``(i, r)`` distributes total weight one.
    """

    eta: int
    nu: int
    pf: np.ndarray
    pm: np.ndarray

    def __post_init__(self):
        pf = np.array(self.pf, dtype=float)
        pm = np.array(self.pm, dtype=float)
        pf.flags.writeable = False
        pm.flags.writeable = False
        object.__setattr__(self, "pf", pf)
        object.__setattr__(self, "pm", pm)
        validate_general(self)

    @property
    def dim(self) -> int:
        return self.eta + self.nu

    def split(self, t):
        t = np.asarray(t, dtype=float)
        if t.shape[-1] != self.dim:
            raise DimensionMismatch(f"state has {t.shape[-1]} coordinates, operator expects {self.dim}")
        return t[..., : self.eta], t[..., self.eta:]


def validate_general(op: GeneralOperator, tol: float = NORM_TOL) -> None:
    if int(op.eta) != op.eta or int(op.nu) != op.nu or op.eta < 1 or op.nu < 1:
        raise DimensionMismatch(f"eta and nu must be positive integers, got {op.eta}, {op.nu}")
    if op.pf.shape != (op.eta, op.nu, op.eta):
        raise DimensionMismatch(f"pf has shape {op.pf.shape}, expected {(op.eta, op.nu, op.eta)}")
    if op.pm.shape != (op.eta, op.nu, op.nu):
        raise DimensionMismatch(f"pm has shape {op.pm.shape}, expected {(op.eta, op.nu, op.nu)}")
    for name, arr in (("pf", op.pf), ("pm", op.pm)):
        if not np.all(np.isfinite(arr)):
            raise ParameterError(f"{name} has non-finite entries")
        if np.any(arr < 0):
            idx = tuple(int(k) + 1 for k in np.argwhere(arr < 0)[0])
            raise NegativeCoefficient(f"{name}{idx}", float(arr[tuple(k - 1 for k in idx)]))
    totals = op.pf.sum(axis=2) + op.pm.sum(axis=2)
    for i in range(op.eta):
        for r in range(op.nu):
            residual = totals[i, r] - 1.0
            if abs(residual) > tol:
                raise NormalizationViolation((i + 1, r + 1), float(residual))


def hemophilia_to_general(params: HemophiliaParams) -> GeneralOperator:
    """Embed the hemophilia operator as the ``eta = nu = 2`` general operator."""
    p = params
    pf = np.zeros((2, 2, 2))
    pm = np.zeros((2, 2, 2))
    # rows: cross (female i, male r); 0-based indices
    pf[0, 0] = (p.a1, 0.0)
    pm[0, 0] = (p.a2, 0.0)
    pf[0, 1] = (0.0, p.c1)
    pm[0, 1] = (p.c2, 0.0)
    pf[1, 0] = (p.b1, p.b2)
    pm[1, 0] = (p.b3, p.b4)
    pf[1, 1] = (0.0, p.d1)
    pm[1, 1] = (p.d2, p.d3)
    return GeneralOperator(2, 2, pf, pm)


def _check_finite(out):
    if not np.all(np.isfinite(out)):
        raise StateOverflow(f"operator image is not finite: {out}")
    return out


def _step(p: HemophiliaParams, x, y, u, v):
    xu, xv, yu, yv = x * u, x * v, y * u, y * v
    return (
        p.a1 * xu + p.b1 * yu,
        p.c1 * xv + p.b2 * yu + p.d1 * yv,
        p.a2 * xu + p.c2 * xv + p.b3 * yu + p.d2 * yv,
        p.b4 * yu + p.d3 * yv,
    )


def apply(params: HemophiliaParams, t) -> np.ndarray:
    """One generation of the hemophilia operator.

    ``t`` may be a single state of shape ``(4,)`` or a stack ``(..., 4)``.
    Raises :class:`StateOverflow` if any output coordinate is not finite.
    """
    t = np.asarray(t, dtype=float)
    if t.shape[-1] != 4:
        raise DimensionMismatch(f"hemophilia states have 4 coordinates, got shape {t.shape}")
    with np.errstate(over="ignore", invalid="ignore"):
        if t.ndim == 1:
            out = np.array(_step(params, *(float(c) for c in t)))
        else:
            out = np.stack(_step(params, t[..., 0], t[..., 1], t[..., 2], t[..., 3]), axis=-1)
    return _check_finite(out)


def apply_general(op: GeneralOperator, t) -> np.ndarray:
    """One generation of a general gonosomal operator."""
    x, y = op.split(t)
    with np.errstate(over="ignore", invalid="ignore"):
        xf = np.einsum("...i,...r,irj->...j", x, y, op.pf)
        ym = np.einsum("...i,...r,irl->...l", x, y, op.pm)
        out = np.concatenate([xf, ym], axis=-1)
    return _check_finite(out)


def residual(params: HemophiliaParams, s) -> float:
    """Max-norm of ``W(s) - s``."""
    s = np.asarray(s, dtype=float)
    return float(np.max(np.abs(apply(params, s) - s)))


def step_function(op):
    """Return ``t -> W(t)`` for either operator type."""
    if isinstance(op, HemophiliaParams):
        return lambda t: apply(op, t)
    if isinstance(op, GeneralOperator):
        return lambda t: apply_general(op, t)
    raise TypeError(f"expected HemophiliaParams or GeneralOperator, got {type(op).__name__}")


class Termination(enum.Enum):
    CapReached = "CapReached"
    ConvergedToOrigin = "ConvergedToOrigin"
    ConvergedToPoint = "ConvergedToPoint"
    Overflowed = "Overflowed"


@dataclass(frozen=True, eq=False)
class Trajectory:
    states: np.ndarray
    termination: Termination

    @property
    def steps(self) -> int:
        return len(self.states) - 1

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def iterate(op, t0, n: int = 200, max_norm: float = 1e12,
            origin_tol: float | None = 1e-12,
            point_tol: float | None = None) -> Trajectory:
    """Iterate ``W`` from ``t0`` for at most ``n`` steps.

    Stops early with ``ConvergedToOrigin`` once the max-norm drops below
    ``origin_tol``, with ``Overflowed`` once it exceeds ``max_norm`` (or the
    next image is not finite, in which case that image is not stored), and,
    if ``point_tol`` is given, with ``ConvergedToPoint`` when two successive
    states are closer than ``point_tol``. ``None`` disables a rule.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    step = step_function(op)
    t = np.asarray(t0, dtype=float)
    if isinstance(op, HemophiliaParams) and t.shape != (4,):
        raise DimensionMismatch(f"expected a state of shape (4,), got {t.shape}")
    if isinstance(op, GeneralOperator):
        op.split(t)
    if not np.all(np.isfinite(t)):
        raise StateOverflow("initial state is not finite")

    def stop_reason(s):
        norm = float(np.max(np.abs(s)))
        if norm > max_norm:
            return Termination.Overflowed
        if origin_tol is not None and norm < origin_tol:
            return Termination.ConvergedToOrigin
        return None

    states = [t]
    termination = stop_reason(t) or Termination.CapReached
    if termination is Termination.CapReached:
        for _ in range(n):
            try:
                nxt = step(states[-1])
            except StateOverflow:
                termination = Termination.Overflowed
                break
            states.append(nxt)
            reason = stop_reason(nxt)
            if reason is not None:
                termination = reason
                break
            if point_tol is not None and np.max(np.abs(nxt - states[-2])) < point_tol:
                termination = Termination.ConvergedToPoint
                break
    return Trajectory(np.array(states), termination)


# -- parameter files ---------------------------------------------------------

def params_from_mapping(data: dict):
    """Build an operator from a decoded parameter document."""
    if "preset" in data and len(data) == 1:
        return preset(data["preset"])
    if {"eta", "nu", "pf", "pm"} <= set(data):
        return GeneralOperator(int(data["eta"]), int(data["nu"]), data["pf"], data["pm"])
    missing = [n for n in PARAM_NAMES if n not in data]
    if missing:
        raise ParameterError(f"parameter document is missing {', '.join(missing)}")
    extra = sorted(set(data) - set(PARAM_NAMES))
    if extra:
        raise ParameterError(f"unknown parameter keys: {', '.join(extra)}")
    return HemophiliaParams(**{n: data[n] for n in PARAM_NAMES})


def params_to_mapping(op) -> dict:
    if isinstance(op, HemophiliaParams):
        return op.as_dict()
    return {"eta": op.eta, "nu": op.nu, "pf": op.pf.tolist(), "pm": op.pm.tolist()}


def load_params(path):
    """Read a JSON parameter file (hemophilia or general operator)."""
    with open(path) as fh:
        return params_from_mapping(json.load(fh))


def save_params(op, path) -> None:
    Path(path).write_text(json.dumps(params_to_mapping(op), indent=2) + "\n")
