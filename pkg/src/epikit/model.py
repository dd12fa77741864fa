"""Domain types, vector fields and exact algebra of the SIR family.

Everything here works in rescaled time ``tau = a * t``, in which the SIR
system reads::

    dS/dtau = -r0 * S * I
    dI/dtau = (r0 * S - 1) * I
    dR/dtau = I

The modified (Kermack-McKendrick) system replaces the factor ``S`` in the
infection term by ``sqrt(2S - 1)``.  The SI (logistic) system drops removal;
in rescaled time its infection rate is ``r0 = b / a``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Tuple

from .errors import DomainError

DEFAULT_I0 = 1e-6
PARAM_TOL = 1e-12
SIMPLEX_TOL = 1e-9
# Half-width below zero tolerated for 2S - 1 before the square root is an error.
SQRT_DOMAIN_TOL = 1e-12

Rates = Tuple[float, float, float]
VectorField = Callable[[float, float], Rates]


class ModelKind(str, enum.Enum):
    SIR = "sir"
    MODIFIED = "modified"
    SI = "si"


@dataclass(frozen=True)
class ModelParams:
    """Parameters of one epidemic.

    Only one of ``s0``/``i0`` needs to be given; the other follows from
    ``s0 + i0 = 1``.  With neither, ``i0`` defaults to ``1e-6``.  The
    degenerate ``i0 = 0`` (``s0 = 1``) is accepted for the closed-form
    analytics, which are stated for ``S0 = 1``; numerical integration
    rejects it.
    """

    r0: float
    a: float = 1.0
    s0: float | None = None
    i0: float | None = None

    def __post_init__(self) -> None:
        s0, i0 = self.s0, self.i0
        if s0 is None and i0 is None:
            i0 = DEFAULT_I0
        if s0 is None:
            s0 = 1.0 - i0
        elif i0 is None:
            i0 = 1.0 - s0
        object.__setattr__(self, "s0", float(s0))
        object.__setattr__(self, "i0", float(i0))

        if not (math.isfinite(self.r0) and self.r0 > 0):
            raise DomainError(f"r0 must be positive, got {self.r0}")
        if not (math.isfinite(self.a) and self.a > 0):
            raise DomainError(f"removal rate a must be positive, got {self.a}")
        if not 0.0 <= self.i0 < 1.0:
            raise DomainError(f"i0 must lie in [0, 1), got {self.i0}")
        if not 0.0 < self.s0 <= 1.0:
            raise DomainError(f"s0 must lie in (0, 1], got {self.s0}")
        if abs(self.s0 + self.i0 - 1.0) > PARAM_TOL:
            raise DomainError(f"s0 + i0 must equal 1, got {self.s0 + self.i0!r}")

    @property
    def b(self) -> float:
        """Infection rate ``b = r0 * a`` in physical time units."""
        return self.r0 * self.a


@dataclass(frozen=True)
class State:
    """One point ``(tau, S, I, R)`` of a trajectory."""

    tau: float
    s: float
    i: float
    r: float = field(default=0.0)

    def __post_init__(self) -> None:
        if abs(self.s + self.i + self.r - 1.0) > SIMPLEX_TOL:
            raise DomainError(
                f"state off the simplex: S + I + R = {self.s + self.i + self.r!r}"
            )
        if self.s <= 0 or self.i < -SIMPLEX_TOL or self.r < -SIMPLEX_TOL:
            raise DomainError(f"state has invalid proportions: {self}")


def _modified_sqrt(s: float) -> float:
    x = 2.0 * s - 1.0
    if x < 0.0:
        if x < -SQRT_DOMAIN_TOL:
            raise DomainError(f"modified model needs S >= 1/2, got S = {s!r}")
        return 0.0
    return math.sqrt(x)


def vector_field(kind: ModelKind, params: ModelParams) -> VectorField:
    """Return ``f(s, i) -> (ds, di, dr)`` for the chosen model in rescaled time."""
    r0 = params.r0
    kind = ModelKind(kind)

    if kind is ModelKind.SIR:

        def f(s: float, i: float) -> Rates:
            new = r0 * s * i
            return -new, new - i, i

    elif kind is ModelKind.MODIFIED:

        def f(s: float, i: float) -> Rates:
            new = r0 * _modified_sqrt(s) * i
            return -new, new - i, i

    else:

        def f(s: float, i: float) -> Rates:
            new = r0 * s * i
            return -new, new, 0.0

    return f


def sir_rhs(state: State, params: ModelParams) -> Rates:
    """Rates ``(dS, dI, dR)`` per unit rescaled time for the SIR model."""
    return vector_field(ModelKind.SIR, params)(state.s, state.i)


def modified_rhs(state: State, params: ModelParams) -> Rates:
    """Rates for the modified model; raises DomainError when ``2S - 1 < -1e-12``."""
    return vector_field(ModelKind.MODIFIED, params)(state.s, state.i)


def si_rhs(state: State, params: ModelParams) -> Rates:
    return vector_field(ModelKind.SI, params)(state.s, state.i)


def effective_r(s: float, params: ModelParams, kind: ModelKind = ModelKind.SIR) -> float:
    """Effective reproduction number: ``r0*S`` (SIR) or ``r0*sqrt(2S-1)`` (modified)."""
    kind = ModelKind(kind)
    if not 0.0 < s <= 1.0:
        raise DomainError(f"S must lie in (0, 1], got {s!r}")
    if kind is ModelKind.SIR:
        return params.r0 * s
    if kind is ModelKind.MODIFIED:
        return params.r0 * _modified_sqrt(s)
    raise DomainError("the SI model has no removal, so no effective reproduction number")


def s_of_r(r: float, params: ModelParams) -> float:
    """Susceptible proportion once a proportion ``r`` has been removed."""
    if not 0.0 <= r < 1.0:
        raise DomainError(f"R must lie in [0, 1), got {r!r}")
    return params.s0 * math.exp(-params.r0 * r)


def r_of_s(s: float, params: ModelParams) -> float:
    """Inverse of :func:`s_of_r`: ``R = -ln(S/S0) / r0``."""
    if not 0.0 < s <= params.s0:
        raise DomainError(f"S must lie in (0, s0={params.s0}], got {s!r}")
    return -math.log(s / params.s0) / params.r0


def i_of_s(s: float, params: ModelParams) -> float:
    """Infected proportion on the SIR orbit as a function of S.

    Evaluated as ``i0 + (s0 - S) + log1p((S - s0)/s0) / r0``, which equals
    ``1 - S + ln(S/S0)/r0`` but keeps full relative accuracy near ``S = s0``.
    The domain is ``[S_inf, s0]``: below the final size the expression turns
    negative, which is how the lower bound is detected.
    """
    s0 = params.s0
    if not 0.0 < s <= s0:
        raise DomainError(f"S must lie in (0, s0={s0}], got {s!r}")
    value = params.i0 + (s0 - s) + math.log1p((s - s0) / s0) / params.r0
    if value < 0.0:
        if value < -PARAM_TOL:
            raise DomainError(f"S = {s!r} lies below the final susceptible level")
        return 0.0
    return value


def modified_s_of_r(r: float, params: ModelParams) -> float:
    """``S = 1 - r0 R + (r0 R)^2 / 2`` on the modified orbit through ``S0 = 1``."""
    x = params.r0 * r
    if x < 0.0 or x > 1.0:
        raise DomainError(f"modified algebra needs 0 <= r0*R <= 1, got {x!r}")
    return 1.0 - x + 0.5 * x * x
