"""Grid scans: basins of attraction over state slices and parameter sweeps."""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exceptions import GonodynError, ParameterError
from .fixed_points import Form, form_ii_exists, form_iii_exists, form_iv_exists
from .limits import (
    LimitPrediction,
    PredictorConfig,
    SimulationResult,
    agrees,
    predict_limit,
    simulate_until,
)
from .operator import GROUPS, PARAM_NAMES, HemophiliaParams
from .spectral import Stability, char_coeffs, classify

MAX_GRID_POINTS = 10 ** 7
STATE_NAMES = ("x", "y", "u", "v")


class GridError(GonodynError, ValueError):
    pass


@dataclass(frozen=True)
class Axis:
    name: str
    low: float
    high: float
    count: int

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.low, self.high, self.count)


def parse_grid(spec: str, allowed=None) -> list[Axis]:
    """Parse ``"x=0:5:100,u=0:5:100"`` into axes (``name=low:high:count``).

    Each axis needs ``high > low`` and ``count >= 1``; the product of the
    counts may not exceed ``10**7``.
    """
    axes = []
    for chunk in filter(None, (c.strip() for c in spec.split(","))):
        try:
            name, rng = chunk.split("=")
            low, high, count = rng.split(":")
            axis = Axis(name.strip(), float(low), float(high), int(count))
        except ValueError:
            raise GridError(f"bad grid axis {chunk!r}; expected name=low:high:count") from None
        if allowed is not None and axis.name not in allowed:
            raise GridError(f"unknown grid variable {axis.name!r}; allowed: {', '.join(allowed)}")
        if not axis.high > axis.low or axis.count < 1:
            raise GridError(f"axis {axis.name!r} needs high > low and count >= 1")
        axes.append(axis)
    if not axes:
        raise GridError("empty grid specification")
    if len({a.name for a in axes}) != len(axes):
        raise GridError("grid variables must be distinct")
    total = int(np.prod([a.count for a in axes], dtype=object))
    if total > MAX_GRID_POINTS:
        raise GridError(f"grid has {total} points, limit is {MAX_GRID_POINTS}")
    return axes


def worker_count() -> int:
    n = os.cpu_count() or 1
    cap = os.environ.get("GONODYN_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise GridError(f"GONODYN_THREADS must be an integer, got {cap!r}") from None
    return n


def _ordered_map(fn, items, workers):
    if workers <= 1 or len(items) < 2000:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (8 * workers))))


# -- basins --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BasinRecord:
    index: tuple
    state: np.ndarray
    prediction: LimitPrediction
    simulation: SimulationResult

    @property
    def outcome(self) -> str:
        return self.simulation.outcome.value

    @property
    def steps(self) -> int:
        return self.simulation.steps

    @property
    def agrees(self) -> bool | None:
        return agrees(self.prediction, self.simulation)


def _basin_point(args):
    params, index, state, steps, k_max = args
    pred = predict_limit(params, state, PredictorConfig(k_max=k_max))
    return BasinRecord(index, state, pred, simulate_until(params, state, n=steps))


def basin(params: HemophiliaParams, axes: list[Axis], pinned=(0.0, 0.0, 0.0, 0.0),
          steps: int = 200, k_max: int = 50, workers: int | None = None) -> list[BasinRecord]:
    """Predict and simulate every point of a state grid.

    ``axes`` name the free coordinates (``x``, ``y``, ``u``, ``v``); the other
    coordinates keep their values from ``pinned``. Records come back in
    grid order (last axis fastest) whatever the number of workers.
    """
    for a in axes:
        if a.name not in STATE_NAMES:
            raise GridError(f"basin axes must be state coordinates, got {a.name!r}")
    pinned = np.asarray(pinned, dtype=float)
    slots = [STATE_NAMES.index(a.name) for a in axes]
    tasks = []
    for index in itertools.product(*(range(a.count) for a in axes)):
        state = pinned.copy()
        for slot, a, i in zip(slots, axes, index):
            state[slot] = a.values[i]
        tasks.append((params, index, state, steps, k_max))
    return _ordered_map(_basin_point, tasks, workers or worker_count())


# -- parameter sweeps ------------------------------------------------------------

class RebalanceError(ParameterError):
    pass


def group_of(name: str) -> str:
    for group, names in GROUPS.items():
        if name in names:
            return group
    raise ParameterError(f"unknown coefficient {name!r}")


def rebalance(base: HemophiliaParams, **changes) -> HemophiliaParams:
    """Set some coefficients and rescale the rest of each touched group proportionally.

    Raises :class:`RebalanceError` when the group cannot be renormalized
    (set values outside ``[0, 1]`` or summing past 1, or nothing left to scale).
    """
    values = base.as_dict()
    for group in {group_of(n) for n in changes}:
        names = GROUPS[group]
        set_names = [n for n in names if n in changes]
        rest = [n for n in names if n not in changes]
        fixed_sum = sum(changes[n] for n in set_names)
        if any(not 0.0 <= changes[n] <= 1.0 for n in set_names) or fixed_sum > 1.0 + 1e-12:
            raise RebalanceError(f"values for group {group} leave no valid rebalancing")
        remaining = 1.0 - fixed_sum
        base_rest = sum(values[n] for n in rest)
        if rest and base_rest > 0:
            for n in rest:
                values[n] = values[n] * remaining / base_rest
        elif rest and remaining > 1e-12:
            raise RebalanceError(f"group {group} has no weight left to rescale")
        elif not rest and abs(remaining) > 1e-12:
            raise RebalanceError(f"group {group} does not sum to 1 after setting {set_names}")
        for n in set_names:
            values[n] = changes[n]
    return HemophiliaParams(**values)


_FORM_STATES = {
    Form.II: (form_ii_exists, lambda p: (1 / p.a2, 0.0, 1 / p.a1, 0.0)),
    Form.III: (form_iii_exists, lambda p: (0.0, 1 / p.d3, 0.0, 1 / p.d1)),
    Form.IV: (form_iv_exists, lambda p: (0.0, 1 / p.b3, 1 / p.b2, 0.0)),
}


@dataclass(frozen=True, eq=False)
class SweepRow:
    values: dict
    valid: bool
    forms: dict  # Form -> (StabilityClass, CharCoeffs) for forms that exist
    params: HemophiliaParams | None = None

    def exists(self, form: Form) -> bool:
        return form in self.forms

    def stability(self, form: Form) -> Stability | None:
        entry = self.forms.get(form)
        return entry[0].tag if entry else None


def sweep_point(base: HemophiliaParams, changes: dict) -> SweepRow:
    try:
        params = rebalance(base, **changes)
    except ParameterError:
        return SweepRow(dict(changes), False, {})
    forms = {}
    for form, (exists, state_of) in _FORM_STATES.items():
        if exists(params):
            s = state_of(params)
            forms[form] = (classify(params, s), char_coeffs(params, s))
    return SweepRow(dict(changes), True, forms, params)


def _sweep_task(args):
    return sweep_point(*args)


def sweep(base: HemophiliaParams, axes: list[Axis], workers: int | None = None) -> list[SweepRow]:
    """Existence and stability of forms II-IV over a grid of one or two coefficients.

    Rows come back in grid order (last axis fastest) whatever the number of workers.
    """
    for a in axes:
        if a.name not in PARAM_NAMES:
            raise GridError(f"sweep axes must be coefficients, got {a.name!r}")
    if len(axes) > 2:
        raise GridError("sweep varies at most two coefficients")
    tasks = [(base, dict(zip((a.name for a in axes), combo)))
             for combo in itertools.product(*(a.values for a in axes))]
    return _ordered_map(_sweep_task, tasks, workers or worker_count())
