"""Fixed-step classical Runge-Kutta integration with dense output.

Trajectories are stored as parallel numpy arrays together with the vector
field evaluated at every node, so any step can be interpolated with a cubic
Hermite polynomial.  That interpolant is what :func:`locate_event` searches.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import List, Union

import numpy as np

from .errors import ConfigError, DomainError, EventNotFound
from .model import (
    SQRT_DOMAIN_TOL,
    ModelKind,
    ModelParams,
    State,
    VectorField,
    vector_field,
)

# I must fall this many steps in a row before the extinction threshold applies.
FALLING_STEPS = 10
MAX_HALVINGS = 40
EVENT_TAU_TOL = 1e-12


class Termination(str, enum.Enum):
    INFECTION_EXTINCT = "InfectionExtinct"
    TAU_MAX_REACHED = "TauMaxReached"


@dataclass(frozen=True)
class IntegratorConfig:
    step_size: float = 1e-3
    tau_max: float = 100.0
    extinction_threshold: float = 1e-9

    def __post_init__(self) -> None:
        if not (math.isfinite(self.step_size) and self.step_size > 0):
            raise ConfigError(f"step size must be positive, got {self.step_size}")
        if not (math.isfinite(self.tau_max) and self.tau_max > 0):
            raise ConfigError(f"tau_max must be positive, got {self.tau_max}")
        if not self.extinction_threshold > 0:
            raise ConfigError(
                f"extinction threshold must be positive, got {self.extinction_threshold}"
            )


@dataclass(frozen=True)
class Trajectory:
    """Solution of one model on a uniform rescaled-time grid.

    ``rates`` holds ``(dS, dI, dR)`` at every node; row ``k`` belongs to
    ``tau[k]``.
    """

    params: ModelParams
    model_kind: ModelKind
    tau: np.ndarray
    s: np.ndarray
    i: np.ndarray
    r: np.ndarray
    rates: np.ndarray
    step_size: float
    termination: Termination

    def __len__(self) -> int:
        return len(self.tau)

    @cached_property
    def states(self) -> List[State]:
        return [
            State(float(t), float(s), float(i), float(r))
            for t, s, i, r in zip(self.tau, self.s, self.i, self.r)
        ]

    @property
    def final(self) -> State:
        return State(float(self.tau[-1]), float(self.s[-1]), float(self.i[-1]), float(self.r[-1]))

    def interpolate(self, tau: float) -> State:
        """Cubic Hermite interpolant of the state at ``tau``."""
        if not self.tau[0] <= tau <= self.tau[-1]:
            raise DomainError(f"tau={tau} outside [{self.tau[0]}, {self.tau[-1]}]")
        k = int(np.searchsorted(self.tau, tau, side="right")) - 1
        k = min(max(k, 0), len(self.tau) - 2)
        s, i, r = _hermite(self, k, tau)
        return State(tau, s, i, r)


def _rk4(f: VectorField, s: float, i: float, r: float, k1, h: float):
    a1, b1, c1 = k1
    hh = 0.5 * h
    a2, b2, c2 = f(s + hh * a1, i + hh * b1)
    a3, b3, c3 = f(s + hh * a2, i + hh * b2)
    a4, b4, c4 = f(s + h * a3, i + h * b3)
    w = h / 6.0
    return (
        s + w * (a1 + 2.0 * (a2 + a3) + a4),
        i + w * (b1 + 2.0 * (b2 + b3) + b4),
        r + w * (c1 + 2.0 * (c2 + c3) + c4),
    )


_S_FLOOR = 0.5 - 0.5 * SQRT_DOMAIN_TOL


def _guarded_step(f: VectorField, s: float, i: float, r: float, k1, h: float):
    """RK4 step for the modified model that never leaves ``S >= 1/2``.

    A step that lands (or has a stage) below the square-root domain is
    rejected and retried with a halved local step, up to MAX_HALVINGS times.
    """
    done = 0.0
    dt = h
    halvings = 0
    while h - done > 0.0:
        dt = min(dt, h - done)
        try:
            ns, ni, nr = _rk4(f, s, i, r, k1, dt)
            ok = ns >= _S_FLOOR
        except DomainError:
            ok = False
        if not ok:
            halvings += 1
            if halvings > MAX_HALVINGS:
                raise DomainError(f"modified step left S >= 1/2 after {MAX_HALVINGS} halvings")
            dt *= 0.5
            continue
        s, i, r = ns, ni, nr
        done += dt
        if h - done <= 1e-15 * h:
            break
        k1 = f(s, i)
    return s, i, r


def integrate(
    params: ModelParams,
    model_kind: ModelKind = ModelKind.SIR,
    config: IntegratorConfig | None = None,
) -> Trajectory:
    """Integrate one model from ``(s0, i0, 0)`` with classical RK4.

    Stops with ``InfectionExtinct`` once I has fallen for FALLING_STEPS
    consecutive steps and is below the extinction threshold, otherwise at
    ``tau_max``.  For the SI model the time axis is still ``tau = a*t`` and
    the infection rate in those units is ``r0``.
    """
    config = config or IntegratorConfig()
    kind = ModelKind(model_kind)
    if not config.extinction_threshold < params.i0:
        raise ConfigError(
            f"extinction threshold {config.extinction_threshold} must be below i0={params.i0}"
        )
    if kind is ModelKind.MODIFIED and params.r0 <= 1.0:
        raise DomainError(f"the modified model needs r0 > 1, got {params.r0}")

    f = vector_field(kind, params)
    step = _guarded_step if kind is ModelKind.MODIFIED else _rk4
    h = config.step_size
    tau_max = config.tau_max
    threshold = config.extinction_threshold
    n_full = int(math.floor(tau_max / h * (1.0 + 1e-12)))

    s, i, r = params.s0, params.i0, 0.0
    k1 = f(s, i)
    taus, ss, ii, rr, ks = [0.0], [s], [i], [r], [k1]
    falling = 0
    termination = Termination.TAU_MAX_REACHED
    n = 0
    while True:
        if n < n_full:
            dt, tau_next = h, (n + 1) * h
        else:
            dt = tau_max - n * h
            if dt <= 1e-12 * h:
                break
            tau_next = tau_max
        i_prev = i
        s, i, r = step(f, s, i, r, k1, dt)
        k1 = f(s, i)
        n += 1
        taus.append(tau_next)
        ss.append(s)
        ii.append(i)
        rr.append(r)
        ks.append(k1)
        falling = falling + 1 if i < i_prev else 0
        if falling >= FALLING_STEPS and i < threshold:
            termination = Termination.INFECTION_EXTINCT
            break
        if tau_next >= tau_max:
            break

    return Trajectory(
        params=params,
        model_kind=kind,
        tau=np.array(taus),
        s=np.array(ss),
        i=np.array(ii),
        r=np.array(rr),
        rates=np.array(ks),
        step_size=h,
        termination=termination,
    )


# --- event location -------------------------------------------------------


@dataclass(frozen=True)
class PeakOfI:
    """Maximum of I, i.e. where dI/dtau changes sign from + to -."""


@dataclass(frozen=True)
class SCrossesValue:
    value: float


@dataclass(frozen=True)
class IFallsBelow:
    value: float


Event = Union[PeakOfI, SCrossesValue, IFallsBelow]


def _hermite(traj: Trajectory, k: int, tau: float):
    t0, t1 = traj.tau[k], traj.tau[k + 1]
    h = t1 - t0
    th = (tau - t0) / h
    th2, th3 = th * th, th * th * th
    h00 = 2 * th3 - 3 * th2 + 1
    h10 = th3 - 2 * th2 + th
    h01 = -2 * th3 + 3 * th2
    h11 = th3 - th2
    y0 = (traj.s[k], traj.i[k], traj.r[k])
    y1 = (traj.s[k + 1], traj.i[k + 1], traj.r[k + 1])
    f0, f1 = traj.rates[k], traj.rates[k + 1]
    return tuple(
        float(h00 * y0[c] + h10 * h * f0[c] + h01 * y1[c] + h11 * h * f1[c]) for c in range(3)
    )


def _hermite_slope(traj: Trajectory, k: int, tau: float, c: int) -> float:
    t0, t1 = traj.tau[k], traj.tau[k + 1]
    h = t1 - t0
    th = (tau - t0) / h
    th2 = th * th
    y0 = (traj.s[k], traj.i[k], traj.r[k])[c]
    y1 = (traj.s[k + 1], traj.i[k + 1], traj.r[k + 1])[c]
    f0, f1 = traj.rates[k][c], traj.rates[k + 1][c]
    return float(
        ((6 * th2 - 6 * th) * (y0 - y1)) / h
        + (3 * th2 - 4 * th + 1) * f0
        + (3 * th2 - 2 * th) * f1
    )


def _bisect_step(g, lo: float, hi: float) -> float:
    """Root of ``g`` on ``[lo, hi]`` given ``g(lo) > 0 >= g(hi)``."""
    while hi - lo > EVENT_TAU_TOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _first_drop(values: np.ndarray, level: float) -> int:
    """First ``k`` with ``values[k] > level >= values[k+1]``, or -1."""
    hits = np.flatnonzero((values[:-1] > level) & (values[1:] <= level))
    return int(hits[0]) if hits.size else -1


def locate_event(traj: Trajectory, event: Event) -> tuple[float, State]:
    """Find the first occurrence of ``event`` and the interpolated state there.

    The bracketing step is found on the grid; inside it the event is refined
    by bisection on the cubic Hermite interpolant to 1e-12 in tau.
    """
    if len(traj) < 2:
        raise EventNotFound("trajectory has a single point")

    if isinstance(event, PeakOfI):
        k = _first_drop(traj.rates[:, 1], 0.0)
        if k < 0:
            raise EventNotFound("I has no interior maximum on this trajectory")
        tau = _bisect_step(lambda t: _hermite_slope(traj, k, t, 1), traj.tau[k], traj.tau[k + 1])
    elif isinstance(event, (SCrossesValue, IFallsBelow)):
        c = 0 if isinstance(event, SCrossesValue) else 1
        values = traj.s if c == 0 else traj.i
        v = event.value
        if values[0] == v:
            return float(traj.tau[0]), traj.interpolate(float(traj.tau[0]))
        k = _first_drop(values, v)
        if k < 0:
            raise EventNotFound(f"{type(event).__name__}({v}) does not occur")
        tau = _bisect_step(
            lambda t: _hermite(traj, k, t)[c] - v, traj.tau[k], traj.tau[k + 1]
        )
    else:
        raise TypeError(f"unknown event {event!r}")

    return float(tau), traj.interpolate(float(tau))
